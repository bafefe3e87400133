#include "minifs/extractor.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <list>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace minifs {

namespace fs = std::filesystem;

// Decompressed chunks keyed by index, evicted least-recently-used once the
// byte budget is exceeded.
class ChunkCache {
 public:
  explicit ChunkCache(std::uint64_t budget) : budget_(budget) {}

  template <typename Decode>
  std::shared_ptr<const Bytes> get(std::size_t index, Decode&& decode) {
    {
      std::lock_guard lock(mu_);
      if (auto it = entries_.find(index); it != entries_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second.position);
        return it->second.data;
      }
    }
    auto data = std::make_shared<const Bytes>(decode());
    std::lock_guard lock(mu_);
    ++decompressions_;
    if (auto it = entries_.find(index); it != entries_.end()) return it->second.data;
    lru_.push_front(index);
    entries_.emplace(index, Entry{data, lru_.begin()});
    held_ += data->size();
    while (budget_ != 0 && held_ > budget_ && lru_.size() > 1) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      held_ -= entries_.at(victim).data->size();
      entries_.erase(victim);
    }
    return data;
  }

  std::uint64_t decompressions() const {
    std::lock_guard lock(mu_);
    return decompressions_;
  }

 private:
  struct Entry {
    std::shared_ptr<const Bytes> data;
    std::list<std::size_t>::iterator position;
  };

  mutable std::mutex mu_;
  std::uint64_t budget_;
  std::uint64_t held_ = 0;
  std::uint64_t decompressions_ = 0;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, Entry> entries_;
};

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::string msg = std::to_string(violations.size()) + " layout violation(s)";
  for (std::size_t i = 0; i < violations.size() && i < 3; ++i) {
    msg += (i == 0 ? ": " : "; ");
    msg += std::string(to_string(violations[i].kind)) + " (" + violations[i].detail + ")";
  }
  if (violations.size() > 3) msg += "; ...";
  return msg;
}

void require_in_dump(ByteView dump, std::uint64_t start, std::uint64_t length, const char* what) {
  if (start > dump.size() || length > dump.size() - start) {
    throw Error(ErrorCode::TruncatedImage, std::string(what) + " [" + hex(start) + ", +" + std::to_string(length) +
                                               ") runs past the " + std::to_string(dump.size()) + "-byte image");
  }
}

std::string lowercase_extension(std::string_view path) {
  const auto slash = path.rfind('/');
  const std::string_view name = slash == std::string_view::npos ? path : path.substr(slash + 1);
  const auto dot = name.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return {};
  std::string ext(name.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

bool starts_with(ByteView bytes, std::string_view prefix) {
  return bytes.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), bytes.begin(),
                                                     [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; });
}

bool inside(const fs::path& root, const fs::path& target) {
  auto r = root.begin();
  auto t = target.begin();
  for (; r != root.end(); ++r, ++t) {
    if (t == target.end() || *r != *t) return false;
  }
  return t != target.end();
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorCode::ValidationFailed, summarize(violations)), violations_(std::move(violations)) {}

ByteView MiniFsView::chunk_bytes(std::size_t index) const {
  if (index >= chunks_.size()) {
    throw Error(ErrorCode::OffsetOutOfRange, "chunk " + std::to_string(index) + " of " + std::to_string(chunks_.size()));
  }
  const ChunkRecord& c = chunks_[index];
  const std::uint64_t start = layout_.data_start + c.data_offset;
  require_in_dump(source_, start, c.compressed_size, ("chunk " + std::to_string(index)).c_str());
  return source_.subspan(start, c.compressed_size);
}

std::shared_ptr<const Bytes> MiniFsView::chunk(std::size_t index) const {
  return cache_->get(index, [&] {
    return decompress_chunk(chunk_bytes(index), chunks_[index].decompressed_size, options_.decode);
  });
}

std::uint64_t MiniFsView::chunk_decompressions() const noexcept { return cache_->decompressions(); }

MiniFsView open_view(ByteView dump, std::uint64_t base, const ViewOptions& options) {
  require_in_dump(dump, base, kHeaderSize, "header");
  MiniFsView v;
  v.header_ = parse_header(dump.subspan(base, kHeaderSize));
  v.source_ = dump;
  v.options_ = options;
  v.cache_ = std::make_shared<ChunkCache>(options.cache_budget);

  const std::uint64_t names_start = base + kHeaderSize;
  require_in_dump(dump, names_start, v.header_.name_table_size, "table of names");
  auto pool = dump.subspan(names_start, v.header_.name_table_size);
  v.names_ = NameTable(Bytes(pool.begin(), pool.end()));

  const std::uint64_t files_start = names_start + v.header_.name_table_size;
  const std::uint64_t files_len = std::uint64_t{v.header_.file_count} * kFileRecordSize;
  require_in_dump(dump, files_start, files_len, "table of files");
  v.files_ = parse_file_table(dump.subspan(files_start, files_len), v.header_.file_count);

  const std::uint32_t chunk_count = v.files_.empty() ? 0 : infer_chunk_count(v.files_);
  v.layout_ = compute_layout(v.header_, chunk_count, base);
  const std::uint64_t chunks_len = std::uint64_t{chunk_count} * kChunkRecordSize;
  require_in_dump(dump, v.layout_.chunk_table_start, chunks_len, "table of chunks");
  v.chunks_ = parse_chunk_table(dump.subspan(v.layout_.chunk_table_start, chunks_len), chunk_count);

  v.violations_ = validate_layout(v.header_, v.names_, v.files_, v.chunks_, v.layout_, dump.size());
  if (!v.violations_.empty() && !options.force) throw ValidationError(v.violations_);
  return v;
}

std::vector<FileEntry> list_files(const MiniFsView& view) {
  std::vector<FileEntry> out;
  out.reserve(view.files().size());
  for (std::size_t i = 0; i < view.files().size(); ++i) {
    const FileRecord& r = view.files()[i];
    try {
      out.push_back({i, full_path(view.names(), r), r.chunk_index, r.offset_in_chunk, r.file_size});
    } catch (const Error& e) {
      throw Error(e.code(), "file record " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

Bytes read_file(const MiniFsView& view, const Selector& selector) {
  const auto& files = view.files();
  std::size_t index = 0;
  if (const auto* i = std::get_if<std::size_t>(&selector)) {
    if (*i >= files.size()) throw Error(ErrorCode::NotFound, "no file with index " + std::to_string(*i));
    index = *i;
  } else {
    const std::string& wanted = std::get<std::string>(selector);
    std::vector<std::size_t> matches;
    for (std::size_t k = 0; k < files.size(); ++k) {
      try {
        if (full_path(view.names(), files[k]) == wanted) matches.push_back(k);
      } catch (const Error&) {
      }
    }
    if (matches.empty()) throw Error(ErrorCode::NotFound, "no file \"" + wanted + "\"");
    if (matches.size() > 1) {
      throw Error(ErrorCode::AmbiguousPath, std::to_string(matches.size()) + " files named \"" + wanted + "\"");
    }
    index = matches.front();
  }

  const FileRecord& r = files[index];
  if (r.chunk_index >= view.chunks().size()) {
    throw Error(ErrorCode::OffsetOutOfRange, "file " + std::to_string(index) + " references missing chunk " +
                                                 std::to_string(r.chunk_index));
  }
  auto chunk = view.chunk(r.chunk_index);
  if (std::uint64_t{r.offset_in_chunk} + r.file_size > chunk->size()) {
    throw Error(ErrorCode::OffsetOutOfRange, "file " + std::to_string(index) + " runs past its chunk");
  }
  auto first = chunk->begin() + r.offset_in_chunk;
  return Bytes(first, first + r.file_size);
}

ExtractReport extract_all(const MiniFsView& view, const fs::path& out_dir, const ExtractOptions& options) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(ErrorCode::IoError, "output directory " + out_dir.string() + " unusable: " + ec.message());
  }
  const fs::path root = fs::canonical(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot resolve " + out_dir.string() + ": " + ec.message());

  const auto& records = view.files();
  const auto& chunks = view.chunks();
  ExtractReport report;
  report.chunk_count = chunks.size();
  report.files.resize(records.size());

  auto fail = [](ExtractedFile& f, ErrorCode code, std::string message) {
    f.status = FileStatus::Failed;
    f.error = code;
    f.message = std::move(message);
  };

  // Resolve names and pick the chunks that need decoding.
  std::vector<char> wanted(chunks.size(), 0);
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const FileRecord& r = records[i];
    ExtractedFile& f = report.files[i];
    f.index = i;
    f.size = r.file_size;
    f.chunk_index = r.chunk_index;
    try {
      f.path = full_path(view.names(), r);
    } catch (const Error& e) {
      fail(f, e.code(), e.what());
      continue;
    }
    if (auto [it, fresh] = seen.try_emplace(f.path, 0); !fresh) {
      const std::string original = f.path;
      f.path += ".dup" + std::to_string(++it->second);
      report.warnings.push_back("duplicate path " + original + " (file " + std::to_string(i) + ") written as " + f.path);
    }
    if (r.chunk_index >= chunks.size()) {
      fail(f, ErrorCode::OffsetOutOfRange, "chunk " + std::to_string(r.chunk_index) + " is not in the chunk table");
      continue;
    }
    wanted[r.chunk_index] = 1;
  }

  // Decode each wanted chunk exactly once, in parallel.
  std::vector<std::size_t> jobs;
  for (std::size_t c = 0; c < wanted.size(); ++c) {
    if (wanted[c]) jobs.push_back(c);
  }
  std::vector<std::optional<Bytes>> decoded(chunks.size());
  std::vector<std::optional<Error>> chunk_errors(chunks.size());
  {
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t j = next++; j < jobs.size(); j = next++) {
        const std::size_t c = jobs[j];
        try {
          decoded[c] = decompress_chunk(view.chunk_bytes(c), chunks[c].decompressed_size, view.options().decode);
        } catch (const Error& e) {
          chunk_errors[c] = e;
        }
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
  }
  report.chunks_decompressed = jobs.size();

  for (std::size_t i = 0; i < records.size(); ++i) {
    ExtractedFile& f = report.files[i];
    if (f.status == FileStatus::Failed) continue;
    const FileRecord& r = records[i];
    if (chunk_errors[r.chunk_index]) {
      const Error& e = *chunk_errors[r.chunk_index];
      fail(f, e.code(), "chunk " + std::to_string(r.chunk_index) + ": " + e.what());
      continue;
    }
    const Bytes& data = *decoded[r.chunk_index];
    if (std::uint64_t{r.offset_in_chunk} + r.file_size > data.size()) {
      fail(f, ErrorCode::OffsetOutOfRange, "span runs past the decompressed chunk");
      continue;
    }

    const fs::path target = (root / fs::path(f.path)).lexically_normal();
    const fs::path resolved = fs::weakly_canonical(target, ec);
    if (ec || !inside(root, resolved)) {
      fail(f, ErrorCode::UnsafePath, "target " + target.string() + " resolves outside " + root.string());
      continue;
    }
    fs::create_directories(resolved.parent_path(), ec);
    if (ec) {
      fail(f, ErrorCode::IoError, "cannot create " + resolved.parent_path().string() + ": " + ec.message());
      continue;
    }
    std::ofstream out(resolved, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data() + r.offset_in_chunk), r.file_size);
    out.close();
    if (!out) {
      fail(f, ErrorCode::IoError, "cannot write " + resolved.string());
      continue;
    }
    report.total_bytes += r.file_size;
    ++report.written;
    ByteView head(data.data() + r.offset_in_chunk, std::min<std::size_t>(r.file_size, 64));
    ++report.categories[classify(f.path, head)];
  }
  report.failed = records.size() - report.written;
  return report;
}

std::string_view to_string(FileCategory category) noexcept {
  switch (category) {
    case FileCategory::Css: return "css";
    case FileCategory::Html: return "html";
    case FileCategory::Js: return "js";
    case FileCategory::Image: return "images";
    case FileCategory::Key: return "keys";
    case FileCategory::Config: return "config";
    case FileCategory::Binary: return "binary";
  }
  return "binary";
}

FileCategory classify(std::string_view path, ByteView head) {
  if (starts_with(head, "-----BEGIN")) return FileCategory::Key;
  if (starts_with(head, "\x89PNG") || starts_with(head, "\xFF\xD8\xFF") || starts_with(head, "GIF8")) {
    return FileCategory::Image;
  }
  const std::string ext = lowercase_extension(path);
  if (ext == "css") return FileCategory::Css;
  if (ext == "html" || ext == "htm") return FileCategory::Html;
  if (ext == "js") return FileCategory::Js;
  if (ext == "png" || ext == "jpg" || ext == "jpeg" || ext == "gif" || ext == "ico") return FileCategory::Image;
  if (ext == "pem" || ext == "crt" || ext == "cer" || ext == "key") return FileCategory::Key;
  if (ext == "txt" || ext == "cfg" || ext == "dat" || ext == "ini" || ext == "conf") return FileCategory::Config;
  return FileCategory::Binary;
}

CategoryCounts classify_files(std::span<const NamedContent> files) {
  CategoryCounts counts;
  for (const NamedContent& f : files) ++counts[classify(f.path, f.contents)];
  return counts;
}

}  // namespace minifs
