#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uvtransfer/fixtures.hpp"
#include "uvtransfer/mesh.hpp"

using namespace uvt;

namespace {
constexpr const char* kUnitQuad = R"(# unit quad
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
vt 0 0
vt 1 0
vt 1 1
vt 0 1
f 1/1 2/2 3/3 4/4
)";
}

TEST(LoadMesh, QuadIsFanTriangulated) {
    const UvMesh m = parse_obj(kUnitQuad);
    ASSERT_EQ(m.faces.size(), 2u);
    EXPECT_EQ(m.faces[0], (Face{Corner{0, 0}, Corner{1, 1}, Corner{2, 2}}));
    EXPECT_EQ(m.faces[1], (Face{Corner{0, 0}, Corner{2, 2}, Corner{3, 3}}));
    EXPECT_EQ(m.positions.size(), 4u);
    EXPECT_EQ(m.uv_coords.size(), 4u);
}

TEST(LoadMesh, AcceptsNormalsAndIgnoresOtherStatements) {
    const UvMesh m = parse_obj(
        "o thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0 0\nvt 1 0\nvt 0 1\nvn 0 0 1\ns off\nusemtl skin\n"
        "f 1/1/1 2/2/1 3/3/1\n");
    ASSERT_EQ(m.faces.size(), 1u);
    EXPECT_EQ(m.faces[0][2], (Corner{2, 2}));
}

TEST(LoadMesh, NegativeIndicesAreRelative) {
    const UvMesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nf -3/-3 -2/-2 -1/-1\n");
    EXPECT_EQ(m.faces[0], (Face{Corner{0, 0}, Corner{1, 1}, Corner{2, 2}}));
}

TEST(LoadMesh, MissingTexcoordIndexIsRejected) {
    try {
        parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("missing texture coordinate index"), std::string::npos);
        EXPECT_EQ(e.line(), 4u);
    }
    EXPECT_THROW(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1//1 2//1 3//1\n"), ParseError);
}

TEST(LoadMesh, UvOutsideUnitSquareIsRejected) {
    try {
        parse_obj("v 0 0 0\nvt 0.5 1.25\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(LoadMesh, ParseErrorsCarryLineNumbers) {
    try {
        parse_obj("v 0 0 0\nv 1 x 0\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    try {
        parse_obj("v 0 0 0\nvt 0 0\nf 1/1 1/1 7/1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadMesh, MissingFileIsIoError) {
    EXPECT_THROW(load_mesh("/nonexistent/mesh.obj"), IoError);
}

TEST(LoadMesh, SixtyFourTriangleGridMatchesCornerTable) {
    const UvMesh m = fixtures::grid_mesh(4, 8);
    ASSERT_EQ(m.faces.size(), 64u);
    EXPECT_EQ(m.faces, fixtures::grid_corner_table(4, 8));
}

TEST(LoadMesh, GridEightHas128Triangles) {
    const UvMesh m = fixtures::grid_mesh(8, 8);
    EXPECT_EQ(m.faces.size(), 128u);
    EXPECT_EQ(m.faces, fixtures::grid_corner_table(8, 8));
}

TEST(LoadMesh, ReloadIsIdentical) {
    const auto dir = std::filesystem::temp_directory_path() / "uvt_mesh_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "warped.obj").string();
    fixtures::write_text(path, fixtures::grid_obj(6, 5, fixtures::head_warp));
    const UvMesh a = load_mesh(path), b = load_mesh(path);
    EXPECT_EQ(a, b);
    EXPECT_EQ(fingerprint(a), fingerprint(b));

    std::ostringstream out;
    write_obj(out, a);
    EXPECT_EQ(parse_obj(out.str()), a);
}

// An n-gon fan gives n-2 triangles whose signed areas sum to the polygon's.
TEST(LoadMeshProperty, FanTriangulationPreservesArea) {
    for (int n = 3; n <= 12; ++n) {
        std::string obj = "v 0 0 0\n";
        double shoelace = 0.0;
        std::vector<Vec2> poly;
        for (int k = 0; k < n; ++k) {
            const double t = 2 * 3.141592653589793 * k / n;
            const double r = 0.3 + 0.1 * (k % 2);  // non-convex for even n
            poly.push_back({0.5 + r * std::cos(t), 0.5 + r * std::sin(t)});
            obj += "vt " + std::to_string(poly.back().u) + " " + std::to_string(poly.back().v) + "\n";
        }
        obj += "f";
        for (int k = 1; k <= n; ++k) obj += " 1/" + std::to_string(k);
        obj += "\n";
        const UvMesh m = parse_obj(obj);
        ASSERT_EQ(m.faces.size(), static_cast<std::size_t>(n - 2));
        double sum = 0.0;
        for (std::size_t f = 0; f < m.faces.size(); ++f) sum += signed_area(m.uv_triangle(f));
        for (int k = 0; k < n; ++k) {
            const Vec2 a = m.uv_coords[k], b = m.uv_coords[(k + 1) % n];
            shoelace += 0.5 * cross(a, b);
        }
        EXPECT_NEAR(sum, shoelace, 1e-12) << "n=" << n;
    }
}

TEST(UvMesh, ValidateCatchesBadIndices) {
    UvMesh m = parse_obj(kUnitQuad);
    EXPECT_NO_THROW(m.validate());
    m.faces[1][2].uv = 9;
    EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Fingerprint, SensitiveToUvPerturbation) {
    UvMesh m = fixtures::grid_mesh(3, 3);
    const Digest before = fingerprint(m);
    m.uv_coords[5].u += 1e-6;
    EXPECT_NE(fingerprint(m), before);
}
