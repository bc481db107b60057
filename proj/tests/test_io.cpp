#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "foldtrace/astroid.hpp"
#include "foldtrace/io.hpp"

using namespace foldtrace;

namespace {

TraceResult circle_trace() {
    auto f = unit_circle_field();
    TraceConfig cfg;
    cfg.step_x = cfg.step_y = 0.05;
    return trace(f, {1.0, 0.0}, {Axis::Y, Sign::Minus}, cfg);
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST(PointsCsv, RoundTripIsExact) {
    const auto r = circle_trace();
    std::stringstream ss;
    write_points_csv(ss, r.path);
    EXPECT_EQ(read_points_csv(ss), r.path);
}

TEST(PointsCsv, RoundTripAstroid) {
    auto f = astroid_field();
    const auto r = trace(f, {0.0, 1.0}, {Axis::X, Sign::Plus}, astroid_config(0.05, 1.0, 5, 8));
    std::stringstream ss;
    write_points_csv(ss, r.path);
    EXPECT_EQ(read_points_csv(ss), r.path);
}

TEST(PointsCsv, Format) {
    SolutionPath p;
    p.push_back({0.1, -2.0}, PointFlag::Ordinary);
    p.push_back({1.0 / 3.0, 0.0}, PointFlag::TurningPoint);
    p.push_back({5.0, 6.0}, PointFlag::Restart);
    std::ostringstream os;
    write_points_csv(os, p);
    EXPECT_EQ(os.str(),
              "index,x,y,flag\n"
              "0,0.10000000000000001,-2,ordinary\n"
              "1,0.33333333333333331,0,turning_point\n"
              "2,5,6,restart\n");
}

TEST(PointsCsv, RejectsMalformedInput) {
    std::istringstream no_header("0,1,2,ordinary\n");
    EXPECT_THROW(read_points_csv(no_header), std::runtime_error);
    std::istringstream bad_flag("index,x,y,flag\n0,1,2,sideways\n");
    EXPECT_THROW(read_points_csv(bad_flag), std::runtime_error);
    std::istringstream bad_index("index,x,y,flag\n3,1,2,ordinary\n");
    EXPECT_THROW(read_points_csv(bad_index), std::runtime_error);
    std::istringstream short_row("index,x,y,flag\n0,1\n");
    EXPECT_THROW(read_points_csv(short_row), std::runtime_error);
}

TEST(Svg, OnePolylinePerSegmentAndOneMarkerPerTurningPoint) {
    const auto r = circle_trace();
    std::ostringstream os;
    write_svg(os, r.path);
    const std::string svg = os.str();
    EXPECT_EQ(count(svg, "<polyline"), r.path.count(PointFlag::Restart) + 1);
    EXPECT_EQ(count(svg, "<circle class=\"turning-point\""), r.path.count(PointFlag::TurningPoint));
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, WellFormedTags) {
    // Every element is self-closing or matched, and attribute values are quoted numbers.
    const auto r = circle_trace();
    std::ostringstream os;
    write_svg(os, r.path, SvgStyle{400, 300, 20, "Q", "M"});
    const std::string svg = os.str();
    std::istringstream lines(svg);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    int depth = 0;
    const std::regex open_tag(R"(^<([a-z]+)( [a-zA-Z:-]+="[^"<>]*")*>)");
    const std::regex self_closing(R"(^<([a-z]+)( [a-zA-Z:-]+="[^"<>]*")*/>$)");
    const std::regex text_elem(R"(^<text( [a-zA-Z:-]+="[^"<>]*")*>[^<>]*</text>$)");
    while (std::getline(lines, line)) {
        if (std::regex_match(line, self_closing) || std::regex_match(line, text_elem)) continue;
        if (line == "</svg>") {
            --depth;
            continue;
        }
        ASSERT_TRUE(std::regex_search(line, open_tag)) << line;
        ++depth;
    }
    EXPECT_EQ(depth, 0);
}

TEST(Svg, EmptyPath) {
    std::ostringstream os;
    write_svg(os, SolutionPath{});
    EXPECT_NE(os.str().find("</svg>"), std::string::npos);
}
