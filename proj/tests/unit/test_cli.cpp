#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lmival/cli/cli.hpp"
#include "lmival/sdp/sdpa.hpp"

using namespace lmival;
using namespace lmival::cli;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run lmival_run(std::vector<std::string> const& args)
{
    std::ostringstream out, err;
    int const code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(std::string const& name)
{
    return std::filesystem::temp_directory_path() / ("lmival_test_" + name);
}

}  // namespace

TEST(ParseOrders, ListsAndRanges)
{
    EXPECT_EQ(parse_orders("1,2,4"), (std::vector<unsigned>{1, 2, 4}));
    EXPECT_EQ(parse_orders("1..4"), (std::vector<unsigned>{1, 2, 3, 4}));
    EXPECT_EQ(parse_orders("3"), std::vector<unsigned>{3});
    for (char const* bad : {"", "2,1", "1,1", "0", "a", "1..", "4..2", "1;2", "1.5"})
        EXPECT_THROW(parse_orders(bad), UsageError) << bad;
}

TEST(Exit, Codes)
{
    EXPECT_EQ(exit_code(Verdict::validated), 0);
    EXPECT_EQ(exit_code(Verdict::not_validated), 1);
    EXPECT_EQ(exit_code(Verdict::inconclusive), 2);
    EXPECT_EQ(exit_usage, 64);
}

TEST(Validate, ValidatedAtTheKnownBound)
{
    auto const r = lmival_run({"validate", "--model", "acs1dof", "--orders", "1,2",
                               "--max-bound", "1e-5", "--mc-samples", "20", "--sim-steps", "2000"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    auto const j = json::parse(r.out);
    EXPECT_EQ(j["verdict"], "validated");
    ASSERT_EQ(j["orders"].size(), 2u);
    for (auto const& o : j["orders"]) {
        EXPECT_EQ(o["status"], "optimal");
        EXPECT_NEAR(o["bound"].get<double>(), 1e-5, 1e-7);
    }
    EXPECT_TRUE(j["oracle"]["sandwich"].get<bool>());
}

TEST(Validate, NotValidatedBelowTheBound)
{
    auto const r = lmival_run({"validate", "--model", "acs1dof", "--orders", "1",
                               "--max-bound", "1e-6", "--mc-samples", "0"});
    EXPECT_EQ(r.code, 1) << r.out << r.err;
    EXPECT_EQ(json::parse(r.out)["verdict"], "not-validated");
}

TEST(Validate, UnboundedOrderIsInconclusive)
{
    auto const r = lmival_run({"validate", "--model", "acs3dof", "--orders", "1",
                               "--max-bound", "1", "--mc-samples", "0"});
    EXPECT_EQ(r.code, 2) << r.out << r.err;
    auto const j = json::parse(r.out);
    EXPECT_EQ(j["verdict"], "inconclusive");
    EXPECT_EQ(j["orders"][0]["status"], "dual-infeasible");
    EXPECT_TRUE(j["orders"][0]["bound"].is_null());
}

TEST(Validate, UsageErrors)
{
    EXPECT_EQ(lmival_run({}).code, 64);
    EXPECT_EQ(lmival_run({"frobnicate"}).code, 64);
    auto r = lmival_run({"validate", "--model", "acs2dof", "--orders", "1"});
    EXPECT_EQ(r.code, 64);
    EXPECT_NE(r.err.find("acs1dof-uncertain"), std::string::npos) << r.err;
    EXPECT_EQ(lmival_run({"validate", "--model", "acs1dof", "--orders", "2,1"}).code, 64);
    EXPECT_EQ(lmival_run({"validate", "--model", "acs1dof", "--orders", "1", "--min-bound", "0"}).code,
              64);
    EXPECT_EQ(lmival_run({"validate", "--model", "acs1dof", "--orders", "1", "--gap-tol", "-1"}).code,
              64);
    EXPECT_EQ(lmival_run({"validate", "--orders", "1"}).code, 64);
    EXPECT_EQ(lmival_run({"size", "-n", "0", "-d", "1", "-K", "1"}).code, 64);
    EXPECT_EQ(lmival_run({"simulate", "--model", "acs1dof"}).code, 64);
    EXPECT_EQ(lmival_run({"--help"}).code, 0);
}

TEST(Validate, MalformedModelFileIsAUsageError)
{
    auto const p = scratch("bad_model.json");
    std::ofstream(p) << "{\"name\": 3}";
    EXPECT_EQ(lmival_run({"validate", "--model", p.string(), "--orders", "1"}).code, 64);
    std::filesystem::remove(p);
}

TEST(Report, SchemaMatchesTheGolden)
{
    auto const r = lmival_run({"validate", "--model", "acs1dof", "--orders", "1", "--max-bound",
                               "1e-5", "--mc-samples", "4", "--sim-steps", "1000"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(LMIVAL_TEST_DATA "/report_schema.json");
    ASSERT_TRUE(in);
    EXPECT_EQ(json_schema(json::parse(r.out)), json::parse(in));
}

TEST(Report, WrittenToFile)
{
    auto const p = scratch("report.json");
    auto const r = lmival_run({"validate", "--model", "acs1dof", "--orders", "1", "--mc-samples",
                               "0", "-o", p.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "verdict: validated\n");
    std::ifstream in(p);
    EXPECT_EQ(json::parse(in)["format"], "lmival-report/1");
    std::filesystem::remove(p);
}

TEST(Report, HashTracksTheModel)
{
    auto const a = resolve_model("acs1dof");
    auto b = a;
    EXPECT_EQ(model_hash(a), model_hash(b));
    EXPECT_EQ(model_hash(a).size(), 16u);
    b.horizon *= 2.0;
    EXPECT_NE(model_hash(a), model_hash(b));
}

TEST(ExportSdpa, ParsesBack)
{
    auto const r = lmival_run({"export-sdpa", "--model", "acs1dof", "--order", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto const doc = sdp::parse_sdpa(r.out);
    EXPECT_EQ(doc.m, 75u);
    EXPECT_EQ(doc.to_text(), r.out);
}

TEST(ExportSdpa, MatchesTheCrosscheckInput)
{
    auto const r = lmival_run({"export-sdpa", "--model", "acs1dof", "--order", "2"});
    std::ifstream in(LMIVAL_TEST_DATA "/acs1dof_order2.dat-s");
    std::ostringstream os;
    os << in.rdbuf();
    EXPECT_EQ(r.out, os.str());
}

TEST(Size, PrintsCounts)
{
    auto const r = lmival_run({"size", "-n", "2", "-d", "4", "-K", "3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "N=45 M=15 total=135");
}

TEST(Simulate, DegreesAndCsv)
{
    auto const csv = scratch("traj.csv");
    auto const r = lmival_run({"simulate", "--model", "acs1dof", "--x0", "50,-1", "--deg",
                               "--steps", "500", "--csv", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto const j = json::parse(r.out);
    EXPECT_NEAR(j["initial"][0].get<double>(), 50.0 * 3.14159265358979323846 / 180.0, 1e-15);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "tau,x1,x2,cell");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);)
        ++rows;
    EXPECT_GE(rows, 501u);
    std::filesystem::remove(csv);
}
