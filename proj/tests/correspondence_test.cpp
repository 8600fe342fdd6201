#include <gtest/gtest.h>

#include <random>

#include "uvtransfer/correspondence.hpp"
#include "uvtransfer/fixtures.hpp"

using namespace uvt;

TEST(LoadCorrespondence, VertexMode) {
    const auto m = parse_correspondence(R"({"mode":"vertex","pairs":{"0":0,"1":1,"2":2}})");
    EXPECT_EQ(m.mode, CorrespondenceMode::vertex);
    EXPECT_EQ(m.size(), 3u);
    EXPECT_EQ(m.lookup(1), 1u);
    EXPECT_FALSE(m.lookup(3));
}

TEST(LoadCorrespondence, FaceMode) {
    const auto m = parse_correspondence(R"({"mode":"face","pairs":{"5":12}})");
    EXPECT_EQ(m.mode, CorrespondenceMode::face);
    EXPECT_EQ(m.size(), 1u);
    EXPECT_EQ(m.lookup(5), 12u);
}

TEST(LoadCorrespondence, DuplicateTargetRejected) {
    try {
        parse_correspondence(R"({"mode":"vertex","pairs":{"0":1,"0":2}})");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate target index"), std::string::npos);
    }
}

TEST(LoadCorrespondence, SchemaViolations) {
    EXPECT_THROW(parse_correspondence("[]"), ParseError);
    EXPECT_THROW(parse_correspondence(R"({"pairs":{}})"), ParseError);
    EXPECT_THROW(parse_correspondence(R"({"mode":"edge","pairs":{}})"), ParseError);
    EXPECT_THROW(parse_correspondence(R"({"mode":"face","pairs":{"a":1}})"), ParseError);
    EXPECT_THROW(parse_correspondence(R"({"mode":"face","pairs":{"-1":1}})"), ParseError);
    EXPECT_THROW(parse_correspondence(R"({"mode":"face","pairs":{"1":-4}})"), ParseError);
    EXPECT_THROW(parse_correspondence(R"({"mode":"face","pairs":{"1":1.5}})"), ParseError);
    EXPECT_THROW(parse_correspondence(R"({"mode":"face","pairs":{},"extra":1})"), ParseError);
    EXPECT_THROW(parse_correspondence(R"({"mode":"face",)"), ParseError);
}

TEST(LoadCorrespondence, EmptyPairsIsLegal) {
    EXPECT_EQ(parse_correspondence(R"({"mode":"face","pairs":{}})").size(), 0u);
}

TEST(LoadCorrespondence, EagerValidationAgainstMeshes) {
    const UvMesh grid = fixtures::grid_mesh(2, 2);  // 9 positions, 8 faces
    auto ok = parse_correspondence(R"({"mode":"face","pairs":{"7":0}})");
    EXPECT_NO_THROW(ok.validate(grid, grid));
    auto bad_target = parse_correspondence(R"({"mode":"face","pairs":{"8":0}})");
    EXPECT_THROW(bad_target.validate(grid, grid), ValidationError);
    auto bad_source = parse_correspondence(R"({"mode":"vertex","pairs":{"0":9}})");
    EXPECT_THROW(bad_source.validate(grid, grid), ValidationError);
}

TEST(CorrespondenceProperty, SerializeRoundTrip) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        CorrespondenceMap m;
        m.mode = trial % 2 ? CorrespondenceMode::face : CorrespondenceMode::vertex;
        const int n = static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) m.pairs[static_cast<std::uint32_t>(rng() % 1000)] = static_cast<std::uint32_t>(rng());
        EXPECT_EQ(parse_correspondence(serialize_correspondence(m)), m);
    }
}

TEST(Fingerprint, CorrespondenceContentSensitive) {
    auto a = parse_correspondence(R"({"mode":"face","pairs":{"5":12}})");
    auto b = parse_correspondence(R"({"mode":"face","pairs":{"5":13}})");
    auto c = parse_correspondence(R"({"mode":"vertex","pairs":{"5":12}})");
    EXPECT_EQ(fingerprint(a), fingerprint(parse_correspondence(R"({"pairs":{"5":12},"mode":"face"})")));
    EXPECT_NE(fingerprint(a), fingerprint(b));
    EXPECT_NE(fingerprint(a), fingerprint(c));
}
