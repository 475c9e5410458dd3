#ifndef POLARPERT_IO_HPP
#define POLARPERT_IO_HPP
//
// JSON readers and writers.
//
//   Matrix    { "rows": m, "cols": n, "data": [[re, im], ...] }   row-major, m·n entries
//   Subspace  { "ambient": n, "basis": <Matrix> }
//
// Everything else is write-only report output. nlohmann::json keeps object
// keys sorted, so reports are canonically ordered.
//

#include "polarpert/genlab.hpp"

#include <json.hpp>

#include <string>

namespace polarpert {

using Json = nlohmann::json;

Json   matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j);

struct SubspaceInput
{
    Subspace<double> subspace;
    bool             was_orthonormal = false;
};

Json          subspace_to_json(const Subspace<double>& s);
SubspaceInput subspace_from_json(const Json& j, const TolerancePolicy& tol = {});

Json to_json(const SvdResult<double>& s);
Json to_json(const PolarResult<double>& p);
Json to_json(const GapReport<double>& g);
Json to_json(const SylvesterSolution<double>& s);
Json to_json(const Hypotheses& h);
Json to_json(const Certificate& c);
Json to_json(const MainTrace& t);
Json to_json(const CrTrace& t);
Json to_json(const SmallPertReport& r);
Json to_json(const std::vector<ScanStep>& scan);
Json to_json(const CorpusReport& r);

// file helpers; parse and I/O failures throw Error(InvalidInput)
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

Matrix        read_matrix(const std::string& path);
SubspaceInput read_subspace(const std::string& path, const TolerancePolicy& tol = {});

} // namespace polarpert

#endif // POLARPERT_IO_HPP
