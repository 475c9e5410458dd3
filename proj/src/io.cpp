#include "polarpert/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace polarpert {

namespace {

Index positive_index(const Json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw Error(ErrorKind::InvalidInput, std::string("matrix field '") + key + "' must be an integer");
    const auto v = j.at(key).get<long long>();
    if (v < 1)
        throw Error(ErrorKind::InvalidInput, std::string("matrix field '") + key + "' must be positive");
    return static_cast<Index>(v);
}

double finite_number(const Json& j)
{
    if (!j.is_number())
        throw Error(ErrorKind::InvalidInput, "matrix entry component is not a number");
    const double x = j.get<double>();
    if (!std::isfinite(x))
        throw Error(ErrorKind::InvalidInput, "matrix entry is not finite");
    return x;
}

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

Json matrix_to_json(const Matrix& a)
{
    Json data = Json::array();
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            data.push_back({a(i, j).real(), a(i, j).imag()});
    return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j)
{
    if (!j.is_object())
        throw Error(ErrorKind::InvalidInput, "matrix JSON must be an object");

    const Index m = positive_index(j, "rows");
    const Index n = positive_index(j, "cols");

    if (!j.contains("data") || !j.at("data").is_array())
        throw Error(ErrorKind::InvalidInput, "matrix field 'data' must be an array");
    const Json& data = j.at("data");
    if (data.size() != static_cast<std::size_t>(m * n))
        throw Error(ErrorKind::InvalidInput, "matrix data has " + std::to_string(data.size()) + " entries, expected " +
                                                 std::to_string(m * n));

    Matrix a(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index k = 0; k < n; ++k) {
            const Json& e = data[static_cast<std::size_t>(i * n + k)];
            if (!e.is_array() || e.size() != 2)
                throw Error(ErrorKind::InvalidInput, "matrix entry must be a [re, im] pair");
            a(i, k) = Complex(finite_number(e[0]), finite_number(e[1]));
        }
    return a;
}

Json subspace_to_json(const Subspace<double>& s)
{
    return {{"ambient", s.ambient_dim()}, {"dim", s.dim()}, {"basis", matrix_to_json(s.basis())}};
}

SubspaceInput subspace_from_json(const Json& j, const TolerancePolicy& tol)
{
    if (!j.is_object() || !j.contains("ambient") || !j.at("ambient").is_number_integer() || !j.contains("basis"))
        throw Error(ErrorKind::InvalidInput, "subspace JSON needs integer 'ambient' and a 'basis' matrix");

    const auto   ambient = j.at("ambient").get<long long>();
    const Json&  bj      = j.at("basis");
    const Matrix basis   = matrix_from_json(bj);
    if (basis.rows() != ambient)
        throw Error(ErrorKind::InvalidInput, "subspace basis rows differ from 'ambient'");

    SubspaceInput in;
    try {
        in.subspace        = Subspace<double>::from_orthonormal(basis);
        in.was_orthonormal = true;
    } catch (const Error&) {
        in.subspace        = Subspace<double>::span_of(basis, tol);
        in.was_orthonormal = false;
    }
    return in;
}

Json to_json(const SvdResult<double>& s)
{
    return {{"u", matrix_to_json(s.u)},
            {"v", matrix_to_json(s.v)},
            {"singvals", std::vector<double>(s.singvals.data(), s.singvals.data() + s.singvals.size())},
            {"rank", s.rank}};
}

Json to_json(const PolarResult<double>& p)
{
    return {{"q", matrix_to_json(p.q)}, {"h", matrix_to_json(p.h)}, {"sigma", p.sigma}, {"rank", p.rank}};
}

Json to_json(const GapReport<double>& g)
{
    return {{"delta_vw", g.delta_vw}, {"delta_wv", g.delta_wv}, {"gap_hat", g.gap_hat}, {"gap_diff", g.gap_diff}};
}

Json to_json(const SylvesterSolution<double>& s)
{
    return {{"x", matrix_to_json(s.x)},
            {"residual", s.residual},
            {"separation", optional_number(s.separation)},
            {"bound_value", optional_number(s.bound_value)}};
}

Json to_json(const Hypotheses& h)
{
    return {{"same_shape", h.same_shape},
            {"index_equal", h.index_equal},
            {"rank1", h.rank1},
            {"rank2", h.rank2},
            {"delta_range_zero", h.delta_range_zero},
            {"delta_kernel_zero", h.delta_kernel_zero},
            {"gap_range_lt1", h.gap_range_lt1},
            {"gap_kernel_lt1", h.gap_kernel_lt1},
            {"range_gap_hat", h.range_gap.gap_hat},
            {"range_gap_diff", h.range_gap.gap_diff},
            {"kernel_gap_hat", h.kernel_gap.gap_hat},
            {"kernel_gap_diff", h.kernel_gap.gap_diff},
            {"range_class", to_string(h.range_class)},
            {"kernel_class", to_string(h.kernel_class)}};
}

Json to_json(const Certificate& c)
{
    // flat: the hypothesis fields sit next to the bounds
    Json j = to_json(c.hyp);
    j.update(Json{{"sigma1", c.sigma1},
                  {"sigma2", c.sigma2},
                  {"dist", c.dist},
                  {"qdist", c.qdist},
                  {"bound_main", c.bound_main},
                  {"bound_improved", c.bound_improved},
                  {"bound_cr_plain", c.bound_cr_plain},
                  {"bound_cr_gap", optional_number(c.bound_cr_gap)},
                  {"main_applicable", c.main_applicable},
                  {"cr_gap_applicable", c.cr_gap_applicable},
                  {"main_holds", c.main_holds},
                  {"improved_holds", c.improved_holds},
                  {"cr_plain_holds", c.cr_plain_holds},
                  {"cr_gap_holds", c.cr_gap_holds}});
    return j;
}

Json to_json(const MainTrace& t)
{
    return {{"swapped", t.swapped},
            {"dilated", t.dilated},
            {"sigma1", t.sigma1},
            {"sigma2", t.sigma2},
            {"dist", t.dist},
            {"qdist", t.qdist},
            {"summand", t.summand},
            {"summand_holds", t.summand_holds},
            {"x_norm", t.x_norm},
            {"rhs_norm", t.rhs_norm},
            {"sylvester_bound", t.sylvester_bound},
            {"identity_residual", t.identity_residual},
            {"resolve_error", t.resolve_error},
            {"x_equals_qdist", t.x_equals_qdist},
            {"sylvester_holds", t.sylvester_holds},
            {"identity_holds", t.identity_holds},
            {"resolve_holds", t.resolve_holds},
            {"all_hold", t.all_hold()}};
}

Json to_json(const CrTrace& t)
{
    return {{"swapped", t.swapped},
            {"sigma1", t.sigma1},
            {"sigma2", t.sigma2},
            {"dist", t.dist},
            {"qdist", t.qdist},
            {"first_term", t.first_term},
            {"second_term", t.second_term},
            {"vanishing_term", t.vanishing_term},
            {"kernel_term", t.kernel_term},
            {"cokernel_term", t.cokernel_term},
            {"range_gap", t.range_gap},
            {"x_norm", t.x_norm},
            {"rhs_norm", t.rhs_norm},
            {"identity_residual", t.identity_residual},
            {"first_holds", t.first_holds},
            {"second_holds", t.second_holds},
            {"vanishing_holds", t.vanishing_holds},
            {"kernel_holds", t.kernel_holds},
            {"cokernel_holds", t.cokernel_holds},
            {"sylvester_holds", t.sylvester_holds},
            {"x_holds", t.x_holds},
            {"split_holds", t.split_holds},
            {"identity_holds", t.identity_holds},
            {"all_hold", t.all_hold()}};
}

Json to_json(const SmallPertReport& r)
{
    return {{"sigma1", r.sigma1},
            {"sigma2", r.sigma2},
            {"dist", r.dist},
            {"gap_hat", r.gap_hat},
            {"ranks_equal", r.ranks_equal},
            {"applies", r.applies},
            {"gap_lt1", r.gap_lt1},
            {"pinv_dist", r.pinv_dist},
            {"wedin_rhs", r.wedin_rhs},
            {"wedin_holds", r.wedin_holds},
            {"implication_holds", r.implication_holds()}};
}

Json to_json(const std::vector<ScanStep>& scan)
{
    Json steps = Json::array();
    for (const auto& s : scan)
        steps.push_back({{"lambda", {s.lambda.real(), s.lambda.imag()}},
                         {"lambda_next", {s.lambda_next.real(), s.lambda_next.imag()}},
                         {"qdist", s.qdist},
                         {"bound", optional_number(s.bound)}});
    return {{"samples", scan.size()}, {"max_step_distance", max_step_distance(scan)}, {"steps", std::move(steps)}};
}

Json to_json(const CorpusReport& r)
{
    Json failures = Json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"trial", f.trial}, {"seed", f.seed}, {"check", f.check}});

    return {{"trials", r.trials},
            {"failures", std::move(failures)},
            {"worst_slack", r.worst_slack},
            {"runtime_seconds", r.runtime_seconds},
            {"ensemble_counts", r.ensemble_counts},
            {"applicable_counts", r.applicable_counts}};
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, "'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::InvalidInput, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out)
        throw Error(ErrorKind::InvalidInput, "write to '" + path + "' failed");
}

Matrix read_matrix(const std::string& path)
{
    try {
        return matrix_from_json(read_json_file(path));
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, "'" + path + "': " + e.what());
    }
}

SubspaceInput read_subspace(const std::string& path, const TolerancePolicy& tol)
{
    try {
        return subspace_from_json(read_json_file(path), tol);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, "'" + path + "': " + e.what());
    }
}

} // namespace polarpert
