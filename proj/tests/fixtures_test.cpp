#include <gtest/gtest.h>

#include <sstream>

#include "minifs/error.hpp"
#include "minifs/extractor.hpp"
#include "minifs/fixtures.hpp"
#include "support.hpp"

namespace minifs {
namespace {

TEST(SplitMix64, ReferenceSequence) {
  // First outputs for seed 0, evaluated from the recurrence outside this codebase.
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(rng.next(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(rng.next(), 0x06C45D188009454Full);
}

TEST(Fixtures, Deterministic) {
  for (const char* shape : {"minimal", "multi-chunk", "paper-like"}) {
    const auto a = make_fixture({shape, 5});
    const auto b = make_fixture({shape, 5});
    EXPECT_EQ(a.dump, b.dump) << shape;
    EXPECT_EQ(a.manifest, b.manifest) << shape;
  }
  EXPECT_NE(make_fixture({"multi-chunk", 1}).dump, make_fixture({"multi-chunk", 2}).dump);
}

TEST(Fixtures, UnknownShape) {
  try {
    make_fixture({"squashfs", 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownShape);
  }
}

TEST(Fixtures, Minimal) {
  const auto fx = make_fixture({"minimal", 1});
  ASSERT_EQ(fx.manifest.files.size(), 1u);
  EXPECT_EQ(fx.manifest.files[0].path, "a/b.txt");
  EXPECT_EQ(fx.manifest.magic_offset, 0u);
  EXPECT_EQ(fx.manifest.image_length, fx.dump.size());
}

TEST(Fixtures, MultiChunkLastRecordRule) {
  const auto fx = make_fixture({"multi-chunk", 3});
  EXPECT_GE(fx.manifest.chunk_count, 2u);
  EXPECT_EQ(fx.manifest.files.back().chunk_index + 1, fx.manifest.chunk_count);
}

TEST(Fixtures, FiveRegionShape) {
  const auto fx = make_fixture({"paper-like", 7});
  ASSERT_EQ(fx.manifest.sections.size(), 5u);
  EXPECT_EQ(fx.manifest.sections[2].label, "minifs");
  EXPECT_EQ(fx.manifest.sections[2].start, fx.manifest.magic_offset);
}

// The manifest is built without parsing; the real parser must agree with it.
TEST(Fixtures, ManifestMatchesParser) {
  for (const char* shape : {"minimal", "multi-chunk", "paper-like"}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto fx = make_fixture({shape, seed});
      const auto& m = fx.manifest;
      EXPECT_EQ(m.dump_length, fx.dump.size());
      const auto v = open_view(fx.dump, m.magic_offset);
      EXPECT_TRUE(v.violations().empty());
      EXPECT_EQ(v.chunks().size(), m.chunk_count);
      const auto files = list_files(v);
      ASSERT_EQ(files.size(), m.files.size());
      const auto contents = test::as_map(fx.entries);
      for (std::size_t i = 0; i < files.size(); ++i) {
        EXPECT_EQ(files[i].path, m.files[i].path);
        EXPECT_EQ(files[i].file_size, m.files[i].size);
        EXPECT_EQ(files[i].chunk_index, m.files[i].chunk_index);
        EXPECT_EQ(read_file(v, i), contents.at(files[i].path));
      }
      const auto& last = v.chunks().back();
      EXPECT_EQ(v.layout().data_start + last.data_offset + last.compressed_size, m.magic_offset + m.image_length);
    }
  }
}

TEST(Fixtures, ManifestTextRoundTrip) {
  const auto fx = make_fixture({"paper-like", 3});
  std::stringstream ss;
  write_manifest(ss, fx.manifest);
  EXPECT_EQ(read_manifest(ss), fx.manifest);
}

}  // namespace
}  // namespace minifs
