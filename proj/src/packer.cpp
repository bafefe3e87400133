#include "minifs/packer.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include "minifs/error.hpp"

namespace minifs {

namespace fs = std::filesystem;

namespace {

void require_name_bytes(std::string_view s) {
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x20 || c >= 0x7F) {
      throw Error(ErrorCode::NonAsciiName, "byte " + hex(c, 2) + " in \"" + std::string(s) + "\"");
    }
  }
}

Bytes read_whole_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + p.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + p.string());
  return data;
}

}  // namespace

NamePool build_name_pool(std::span<const std::pair<std::string, std::string>> entries) {
  NamePool out;
  std::map<std::string, std::uint32_t, std::less<>> offsets;
  auto intern = [&](const std::string& s) {
    if (offsets.count(s)) return;
    if (out.pool.size() + s.size() + 1 > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::NameTooAdversarial, "name pool exceeds 32-bit addressing");
    }
    offsets.emplace(s, static_cast<std::uint32_t>(out.pool.size()));
    out.pool.insert(out.pool.end(), s.begin(), s.end());
    out.pool.push_back(0);
  };

  for (const auto& [dir, name] : entries) {
    require_name_bytes(dir);
    require_name_bytes(name);
    check_safe_path(dir, name);
  }
  for (const auto& e : entries) intern(e.first);
  for (const auto& e : entries) intern(e.second);

  out.offsets.reserve(entries.size());
  for (const auto& [dir, name] : entries) out.offsets.emplace_back(offsets.at(dir), offsets.at(name));
  return out;
}

std::vector<ChunkGroup> plan_chunks(std::span<const std::uint32_t> file_sizes, std::uint32_t max_chunk_decompressed) {
  std::vector<ChunkGroup> groups;
  for (std::size_t i = 0; i < file_sizes.size(); ++i) {
    const std::uint32_t size = file_sizes[i];
    if (size > max_chunk_decompressed) {
      throw Error(ErrorCode::FileTooLarge, "file " + std::to_string(i) + " is " + std::to_string(size) +
                                               " bytes, chunk cap is " + std::to_string(max_chunk_decompressed));
    }
    if (groups.empty() ||
        (!groups.back().members.empty() &&
         std::uint64_t{groups.back().decompressed_size} + size > max_chunk_decompressed)) {
      groups.emplace_back();
    }
    ChunkGroup& g = groups.back();
    g.members.push_back(i);
    g.offsets.push_back(g.decompressed_size);
    g.decompressed_size += size;
  }
  return groups;
}

Bytes pack(std::vector<PackEntry> entries, const PackOptions& options) {
  if (!options.preserve_order) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const PackEntry& a, const PackEntry& b) { return a.path < b.path; });
  }

  std::vector<std::pair<std::string, std::string>> names;
  std::vector<std::uint32_t> sizes;
  names.reserve(entries.size());
  sizes.reserve(entries.size());
  for (const PackEntry& e : entries) {
    const auto slash = e.path.rfind('/');
    if (slash == std::string::npos) {
      names.emplace_back("", e.path);
    } else {
      names.emplace_back(e.path.substr(0, slash), e.path.substr(slash + 1));
    }
    if (e.data.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::FileTooLarge, e.path + " exceeds 4 GiB");
    }
    sizes.push_back(static_cast<std::uint32_t>(e.data.size()));
  }

  const NamePool pool = build_name_pool(names);
  const std::vector<ChunkGroup> groups = plan_chunks(sizes, options.max_chunk_decompressed);

  std::vector<FileRecord> records(entries.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t k = 0; k < groups[g].members.size(); ++k) {
      const std::size_t i = groups[g].members[k];
      records[i] = {pool.offsets[i].first, pool.offsets[i].second, static_cast<std::uint32_t>(g),
                    groups[g].offsets[k], sizes[i]};
    }
  }

  std::vector<Bytes> compressed(groups.size());
  {
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, groups.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(groups.size());
    auto work = [&] {
      for (std::size_t g = next++; g < groups.size(); g = next++) {
        try {
          Bytes raw;
          raw.reserve(groups[g].decompressed_size);
          for (std::size_t i : groups[g].members) raw.insert(raw.end(), entries[i].data.begin(), entries[i].data.end());
          compressed[g] = compress_chunk(raw, options.encode);
        } catch (...) {
          errors[g] = std::current_exception();
        }
      }
    };
    {
      std::vector<std::jthread> pool_threads;
      for (unsigned t = 1; t < threads; ++t) pool_threads.emplace_back(work);
      work();
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  MiniFsHeader header;
  header.file_count = static_cast<std::uint32_t>(entries.size());
  header.name_table_size = static_cast<std::uint32_t>(pool.pool.size());
  header.unknown_a = options.unknown_a.value_or(0);
  header.unknown_b = options.unknown_b.value_or(options.mimic_vendor && !entries.empty() ? sizes.front() : 0);

  Bytes image;
  const auto head = encode_header(header);
  image.insert(image.end(), head.begin(), head.end());
  image.insert(image.end(), pool.pool.begin(), pool.pool.end());
  for (const FileRecord& r : records) append_file_record(image, r);
  std::uint64_t running = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (running > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::ArithmeticOverflow, "chunk data offset exceeds 32 bits");
    }
    append_chunk_record(image, {static_cast<std::uint32_t>(running), static_cast<std::uint32_t>(compressed[g].size()),
                                groups[g].decompressed_size});
    running += compressed[g].size();
  }
  for (const Bytes& c : compressed) image.insert(image.end(), c.begin(), c.end());
  return image;
}

std::vector<PackEntry> read_tree(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::IoError, root.string() + " is not a directory");
  std::vector<PackEntry> out;
  for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
    if (ec) throw Error(ErrorCode::IoError, "walking " + root.string() + ": " + ec.message());
    if (it->is_symlink() || !it->is_regular_file()) continue;
    out.push_back({fs::relative(it->path(), root).generic_string(), read_whole_file(it->path())});
  }
  if (ec) throw Error(ErrorCode::IoError, "walking " + root.string() + ": " + ec.message());
  std::sort(out.begin(), out.end(), [](const PackEntry& a, const PackEntry& b) { return a.path < b.path; });
  return out;
}

Bytes pack_directory(const fs::path& root, const PackOptions& options) { return pack(read_tree(root), options); }

}  // namespace minifs
