#include "polarpert/io.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>

using namespace polarpert;

TEST(MatrixJson, RoundTripIsExact)
{
    std::mt19937_64 rng(81);
    const Matrix    a = oracle::gaussian(3, 4, rng);
    const Json      j = Json::parse(matrix_to_json(a).dump());
    EXPECT_TRUE((matrix_from_json(j).array() == a.array()).all());
}

TEST(MatrixJson, RowMajorLayout)
{
    const Json   j = Json::parse(R"({"rows": 2, "cols": 2, "data": [[1,0],[2,0],[3,0],[0,4]]})");
    const Matrix a = matrix_from_json(j);
    EXPECT_EQ(a(0, 1), Complex(2, 0));
    EXPECT_EQ(a(1, 0), Complex(3, 0));
    EXPECT_EQ(a(1, 1), Complex(0, 4));
}

TEST(MatrixJson, Rejections)
{
    for (const char* text : {
             R"({"rows": 2, "cols": 2, "data": [[1,0],[2,0],[3,0]]})",
             R"({"rows": 1, "cols": 1, "data": [["x", 0]]})",
             R"({"rows": 1, "cols": 1, "data": [[1]]})",
             R"({"rows": 0, "cols": 1, "data": []})",
             R"({"rows": 1.5, "cols": 1, "data": [[1,0]]})",
             R"({"cols": 1, "data": [[1,0]]})",
             R"([1, 2])",
         }) {
        try {
            matrix_from_json(Json::parse(text));
            FAIL() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidInput) << text;
        }
    }
}

TEST(MatrixJson, RejectsNonFinite)
{
    Json j = {{"rows", 1}, {"cols", 1}, {"data", {{std::numeric_limits<double>::quiet_NaN(), 0.0}}}};
    try {
        matrix_from_json(j);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }

    // overflowing literals are caught by the parser
    const auto path = std::filesystem::temp_directory_path() / "polarpert_overflow.json";
    {
        std::ofstream(path) << R"({"rows": 1, "cols": 1, "data": [[1e999, 0]]})";
    }
    try {
        read_matrix(path.string());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
    std::filesystem::remove(path);
}

TEST(SubspaceJson, RecordsOrthonormality)
{
    Matrix b(3, 1);
    b << 1, 0, 0;
    const auto in = subspace_from_json(subspace_to_json(Subspace<double>::from_orthonormal(b)));
    EXPECT_TRUE(in.was_orthonormal);
    EXPECT_EQ(in.subspace.dim(), 1);

    Matrix c(3, 2);
    c << 1, 2, 0, 0, 0, 0;
    const auto in2 = subspace_from_json({{"ambient", 3}, {"basis", matrix_to_json(c)}});
    EXPECT_FALSE(in2.was_orthonormal);
    EXPECT_EQ(in2.subspace.dim(), 1);

    EXPECT_THROW(subspace_from_json({{"ambient", 4}, {"basis", matrix_to_json(c)}}), Error);
}

TEST(CertificateJson, FlatWithSortedKeys)
{
    const auto c = certify(oracle::diag({1, 0, 0}), oracle::diag({0, 1, 1}));
    const Json j = to_json(c);

    for (const char* key : {"sigma1", "sigma2", "dist", "qdist", "bound_main", "bound_improved", "bound_cr_plain",
                            "bound_cr_gap", "main_applicable", "cr_gap_applicable", "main_holds", "improved_holds",
                            "cr_plain_holds", "cr_gap_holds", "same_shape", "index_equal", "rank1", "rank2",
                            "delta_range_zero", "delta_kernel_zero", "gap_range_lt1", "gap_kernel_lt1"})
        EXPECT_TRUE(j.contains(key)) << key;

    EXPECT_TRUE(j.at("bound_cr_gap").is_null());
    EXPECT_EQ(j.at("bound_main").get<double>(), 2.0);

    std::string prev;
    for (const auto& [key, value] : j.items()) {
        EXPECT_LT(prev, key);
        prev = key;
    }
}

TEST(CorpusReportJson, Fields)
{
    CorpusReport r;
    r.trials = 3;
    r.failures.push_back({1, 77, "main"});
    r.worst_slack["main"] = 0.5;
    const Json j          = to_json(r);
    EXPECT_EQ(j.at("trials"), 3);
    EXPECT_EQ(j.at("failures")[0].at("seed").get<std::uint64_t>(), 77u);
    EXPECT_EQ(j.at("worst_slack").at("main"), 0.5);
    EXPECT_TRUE(j.contains("runtime_seconds"));
}

TEST(Files, MissingFile)
{
    EXPECT_THROW(read_matrix("/nonexistent/a.json"), Error);
}
