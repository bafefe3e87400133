#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "minifs/error.hpp"
#include "minifs/fixtures.hpp"
#include "minifs/packer.hpp"
#include "minifs/scanner.hpp"
#include "support.hpp"

namespace minifs {
namespace {

std::vector<std::uint64_t> offsets(const std::vector<MagicHit>& hits) {
  std::vector<std::uint64_t> out;
  for (const auto& h : hits) out.push_back(h.offset);
  return out;
}

void expect_tiles(const std::vector<Section>& sections, std::uint64_t length) {
  ASSERT_FALSE(sections.empty());
  EXPECT_EQ(sections.front().start, 0u);
  EXPECT_EQ(sections.back().end, length);
  for (std::size_t i = 0; i + 1 < sections.size(); ++i) {
    EXPECT_EQ(sections[i].end, sections[i + 1].start);
    EXPECT_LT(sections[i].start, sections[i].end);
  }
}

Bytes small_image() {
  PackOptions o;
  o.threads = 1;
  return pack({{"a/b.txt", to_bytes("hello")}, {"c.bin", Bytes(300, 7)}}, o);
}

TEST(FindMagic, EmbeddedAtKnownOffset) {
  Bytes dump(4096, 0);
  const auto img = small_image();
  dump.insert(dump.end(), img.begin(), img.end());
  const auto hits = find_magic(dump);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].offset, 4096u);
  EXPECT_EQ(hits[0].version_hint, VersionHint::V2);
  ASSERT_TRUE(hits[0].parseable());
  EXPECT_EQ(hits[0].summary->end, dump.size());
  EXPECT_EQ(hits[0].summary->header.file_count, 2u);
}

TEST(FindMagic, NoOccurrences) { EXPECT_TRUE(find_magic(Bytes(5000, 'M')).empty()); }

TEST(FindMagic, TextFalsePositive) {
  const auto html = to_bytes("<html><body><p>Powered by MINIFS storage</p></body></html>");
  const auto hits = find_magic(html);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].offset, 26u);
  EXPECT_EQ(hits[0].version_hint, VersionHint::Unknown);
  EXPECT_FALSE(hits[0].parseable());
}

TEST(FindMagic, OverlappingHits) {
  const auto d = to_bytes("xxMINIFSMINIFSyy");
  EXPECT_EQ(offsets(find_magic(d)), (std::vector<std::uint64_t>{2, 8}));
}

TEST(FindMagic, MatchesNaiveOracle) {
  SplitMix64 rng(77);
  for (int i = 0; i < 60; ++i) {
    Bytes d = rng.bytes(rng.below(20000));
    // Restricted alphabet makes partial matches common.
    for (auto& b : d) b = static_cast<std::uint8_t>("MINFSx"[b % 6]);
    const int plants = static_cast<int>(rng.below(5));
    for (int p = 0; p < plants && d.size() >= 6; ++p) {
      const auto at = rng.below(d.size() - 5);
      std::copy(kMagic.begin(), kMagic.end(), d.begin() + static_cast<std::ptrdiff_t>(at));
    }
    ASSERT_EQ(offsets(find_magic(d)), test::naive_find(d, kMagic));
  }
}

TEST(Entropy, KnownValues) {
  const auto all_ff = entropy_profile(Bytes(4096, 0xFF), 1024);
  EXPECT_EQ(all_ff.entropies, (std::vector<double>{0.0, 0.0, 0.0, 0.0}));

  Bytes alt(1024);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 0xFF : 0x00;
  const auto p = entropy_profile(alt, 1024);
  ASSERT_EQ(p.entropies.size(), 1u);
  EXPECT_NEAR(p.entropies[0], 1.0, 1e-9);
  EXPECT_EQ(shannon_entropy({}), 0.0);
}

TEST(Entropy, SeededRandomBlocksAgainstHistogramOracle) {
  SplitMix64 rng(2024);
  const Bytes d = rng.bytes(65536);
  const auto p = entropy_profile(d, 4096);
  ASSERT_EQ(p.entropies.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    const ByteView block(d.data() + i * 4096, 4096);
    EXPECT_NEAR(p.entropies[i], test::histogram_entropy(block), 1e-9);
    EXPECT_GE(p.entropies[i], 7.9);
    EXPECT_LE(p.entropies[i], 8.0);
  }
}

TEST(Entropy, BoundsAndPartialBlock) {
  SplitMix64 rng(4);
  for (int i = 0; i < 50; ++i) {
    Bytes d = rng.bytes(1 + rng.below(10000));
    const auto mask = static_cast<std::uint8_t>(rng.below(256));
    for (auto& b : d) b &= mask;
    const auto p = entropy_profile(d, 256);
    EXPECT_EQ(p.entropies.size(), (d.size() + 255) / 256);
    for (double e : p.entropies) {
      EXPECT_GE(e, 0.0);
      EXPECT_LE(e, 8.0);
    }
    const std::size_t last = (p.entropies.size() - 1) * 256;
    EXPECT_NEAR(p.entropies.back(), test::histogram_entropy(ByteView(d).subspan(last)), 1e-9);
  }
}

TEST(Entropy, PermutationInvariant) {
  SplitMix64 rng(8);
  for (int i = 0; i < 50; ++i) {
    Bytes d = rng.bytes(1024);
    for (auto& b : d) b = static_cast<std::uint8_t>(b % (1 + rng.below(255)));
    Bytes shuffled = d;
    for (std::size_t k = shuffled.size() - 1; k > 0; --k) std::swap(shuffled[k], shuffled[rng.below(k + 1)]);
    EXPECT_DOUBLE_EQ(shannon_entropy(d), shannon_entropy(shuffled));
  }
}

TEST(Entropy, BadArguments) {
  EXPECT_THROW(entropy_profile({}, 1024), Error);
  EXPECT_THROW(entropy_profile(Bytes(100), 1000), Error);
  EXPECT_THROW(entropy_profile(Bytes(100), 8), Error);
}

TEST(Segment, EmptyHighEmpty) {
  SplitMix64 rng(1);
  Bytes d(1024, 0xFF);
  const auto r = rng.bytes(2048);
  d.insert(d.end(), r.begin(), r.end());
  d.insert(d.end(), 1024, 0xFF);
  const auto p = segment_sections(entropy_profile(d, 1024));
  ASSERT_EQ(p.sections.size(), 3u);
  EXPECT_EQ(p.sections[0].label, SectionLabel::Empty);
  EXPECT_EQ(p.sections[1].label, SectionLabel::High);
  EXPECT_EQ(p.sections[1].start, 1024u);
  EXPECT_EQ(p.sections[1].end, 3072u);
  EXPECT_EQ(p.sections[2].label, SectionLabel::Empty);
  expect_tiles(p.sections, d.size());
}

TEST(Segment, UniformDumps) {
  SplitMix64 rng(2);
  const auto random = segment_sections(entropy_profile(rng.bytes(64 * 1024), 1024));
  ASSERT_EQ(random.sections.size(), 1u);
  EXPECT_EQ(random.sections[0].label, SectionLabel::High);

  const auto ff = segment_sections(entropy_profile(Bytes(10000, 0xFF), 1024));
  ASSERT_EQ(ff.sections.size(), 1u);
  EXPECT_EQ(ff.sections[0].label, SectionLabel::Empty);

  // Zero padding is low, not empty, under the default empty byte.
  const auto zeros = segment_sections(entropy_profile(Bytes(4096, 0x00), 1024));
  ASSERT_EQ(zeros.sections.size(), 1u);
  EXPECT_EQ(zeros.sections[0].label, SectionLabel::Low);
  const auto zeros_empty = segment_sections(entropy_profile(Bytes(4096, 0x00), 1024), 7.5, 0x00);
  EXPECT_EQ(zeros_empty.sections[0].label, SectionLabel::Empty);
}

TEST(Segment, TilingProperty) {
  SplitMix64 rng(6);
  for (int i = 0; i < 40; ++i) {
    Bytes d;
    const int regions = 1 + static_cast<int>(rng.below(6));
    for (int r = 0; r < regions; ++r) {
      const std::size_t n = rng.below(8000) + 1;
      switch (rng.below(3)) {
        case 0: d.insert(d.end(), n, 0xFF); break;
        case 1: {
          const auto b = rng.bytes(n);
          d.insert(d.end(), b.begin(), b.end());
          break;
        }
        default:
          for (std::size_t k = 0; k < n; ++k) d.push_back(static_cast<std::uint8_t>('a' + rng.below(4)));
      }
    }
    const auto p = segment_sections(entropy_profile(d, 512));
    expect_tiles(p.sections, d.size());
    for (std::size_t k = 0; k + 1 < p.sections.size(); ++k) EXPECT_NE(p.sections[k].label, p.sections[k + 1].label);
  }
}

TEST(Report, FiveRegionFixtureHasFiveSections) {
  const auto fx = make_fixture({"paper-like", 7});
  const auto r = dump_report(fx.dump);
  ASSERT_EQ(r.sections.size(), 5u);
  expect_tiles(r.sections, fx.dump.size());
  ASSERT_EQ(fx.manifest.sections.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& want = fx.manifest.sections[i];
    const auto& got = r.sections[i];
    EXPECT_EQ(got.start, want.start) << i;
    EXPECT_EQ(got.end, want.end) << i;
    if (want.label == "minifs") {
      ASSERT_TRUE(got.minifs.has_value());
      EXPECT_EQ(got.minifs->offset, fx.manifest.magic_offset);
      EXPECT_EQ(got.minifs->version_hint, VersionHint::V2);
    } else {
      EXPECT_EQ(to_string(got.label), want.label) << i;
      EXPECT_FALSE(got.minifs.has_value());
    }
  }
  EXPECT_TRUE(r.sections[2].minifs.has_value());
}

TEST(Report, BareImageIsOneMinifsSection) {
  const auto fx = make_fixture({"minimal", 1});
  const auto r = dump_report(fx.dump);
  ASSERT_EQ(r.sections.size(), 1u);
  ASSERT_TRUE(r.sections[0].minifs.has_value());
  EXPECT_EQ(r.sections[0].minifs->offset, 0u);
}

TEST(Report, PureTextIsLow) {
  SplitMix64 rng(12);
  Bytes d;
  for (int i = 0; i < 20000; ++i) d.push_back(static_cast<std::uint8_t>("abcdefgh \n"[rng.below(10)]));
  const auto r = dump_report(d);
  ASSERT_FALSE(r.sections.empty());
  for (const auto& s : r.sections) {
    EXPECT_EQ(s.label, SectionLabel::Low);
    EXPECT_FALSE(s.minifs.has_value());
  }
  expect_tiles(r.sections, d.size());
}

TEST(Report, EmptyDump) {
  const auto r = dump_report({});
  EXPECT_TRUE(r.sections.empty());
  EXPECT_TRUE(r.hits.empty());
}

TEST(Report, TilingOnEveryFixture) {
  for (const char* shape : {"minimal", "multi-chunk", "paper-like"}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto fx = make_fixture({shape, seed});
      for (std::uint32_t bs : {64u, 1024u, 4096u}) {
        ScanOptions o;
        o.block_size = bs;
        expect_tiles(dump_report(fx.dump, o).sections, fx.dump.size());
      }
    }
  }
}

}  // namespace
}  // namespace minifs
