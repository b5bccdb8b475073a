#include "stabpencil/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace stabpencil {

namespace {

using nlohmann::json;

template <typename Scalar>
json real_array(const Matrix<Scalar> &M) {
  json arr = json::array();
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) arr.push_back(std::real(M(i, j)));
  return arr;
}

template <typename Scalar>
json imag_array(const Matrix<Scalar> &M) {
  json arr = json::array();
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) arr.push_back(std::imag(M(i, j)));
  return arr;
}

Eigen::MatrixXd matrix_from_array(const json &j, const char *key, Index n) {
  if (!j.contains(key)) throw ParseError(std::string("missing array '") + key + "'");
  const json &arr = j.at(key);
  if (!arr.is_array()) throw ParseError(std::string("'") + key + "' must be an array");
  if (static_cast<Index>(arr.size()) != n * n)
    throw ParseError(std::string("'") + key + "' must have n^2 = " + std::to_string(n * n) + " entries");
  Eigen::MatrixXd M(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const json &v = arr[static_cast<std::size_t>(i * n + j)];
      if (!v.is_number()) throw ParseError(std::string("'") + key + "' entries must be numbers");
      M(i, j) = v.get<double>();
    }
  return M;
}

template <typename Scalar>
json pencil_json(const Pencil<Scalar> &P) {
  json j;
  j["n"] = P.size();
  j["field"] = to_string(field_of<Scalar>);
  j["A_re"] = real_array(P.A);
  j["B_re"] = real_array(P.B);
  if constexpr (is_complex_v<Scalar>) {
    j["A_im"] = imag_array(P.A);
    j["B_im"] = imag_array(P.B);
  }
  return j;
}

template <typename Scalar>
json group_json(const GroupPair<Scalar> &G) {
  json j;
  j["Q_re"] = real_array(G.Q);
  j["Z_re"] = real_array(G.Z);
  if constexpr (is_complex_v<Scalar>) {
    j["Q_im"] = imag_array(G.Q);
    j["Z_im"] = imag_array(G.Z);
  }
  return j;
}

json complex_pair_json(const Complex &a, const Complex &b) {
  return json{{"a_re", a.real()}, {"a_im", a.imag()}, {"b_re", b.real()}, {"b_im", b.imag()}};
}

json eigen_json(const GeneralizedEigenvalue &e) {
  json j = complex_pair_json(e.a, e.b);
  j["kind"] = to_string(e.kind);
  if (e.kind == EigenKind::Finite) {
    const Complex v = e.value();
    j["value_re"] = v.real();
    j["value_im"] = v.imag();
  }
  return j;
}

template <typename Scalar>
json record_json(const SolveRecord<Scalar> &rec) {
  json j;
  j["region"] = to_string(rec.region);
  j["field"] = to_string(field_of<Scalar>);
  j["n"] = rec.input.size();
  j["input"] = pencil_json(rec.input);
  j["pencil"] = pencil_json(rec.result.pencil);
  j["triangular"] = pencil_json(rec.result.triangular);
  j["transforms"] = group_json(rec.result.transforms);
  j["squared_distance"] = rec.result.squared_distance;
  j["distance"] = std::sqrt(rec.result.squared_distance);
  j["is_singular"] = rec.result.is_singular;
  json eigs = json::array();
  for (const auto &e : rec.result.eigenvalues) eigs.push_back(eigen_json(e));
  j["eigenvalues"] = std::move(eigs);
  j["stability"] = to_string(rec.stability);

  json jordan;
  jordan["tol"] = rec.jordan.tol;
  jordan["has_nontrivial_chain"] = rec.jordan.has_nontrivial_chain;
  jordan["indeterminate_count"] = rec.jordan.indeterminate_count;
  json clusters = json::array();
  for (const auto &c : rec.jordan.clusters) {
    json cj = eigen_json(c.eigenvalue);
    cj["algebraic_multiplicity"] = c.algebraic_multiplicity;
    cj["geometric_multiplicity"] = c.geometric_multiplicity;
    clusters.push_back(std::move(cj));
  }
  jordan["clusters"] = std::move(clusters);
  j["jordan"] = std::move(jordan);
  if (rec.regularized) j["regularized"] = pencil_json(*rec.regularized);

  json solver;
  solver["objective_value"] = rec.report.objective_value;
  solver["grad_norm"] = rec.report.grad_norm;
  solver["iterations"] = rec.report.iterations;
  solver["wall_time"] = rec.report.wall_time;
  solver["starts"] = rec.report.starts;
  solver["stop_reason"] = to_string(rec.report.stop_reason);
  json trace = json::array();
  for (const auto &t : rec.report.trace)
    trace.push_back(json{{"iteration", t.iteration},
                         {"f", t.f},
                         {"grad_norm", t.grad_norm},
                         {"radius", t.radius},
                         {"accepted", t.step_accepted}});
  solver["trace"] = std::move(trace);
  j["solver"] = std::move(solver);
  return j;
}

} // namespace

std::string to_string(Field f) { return f == Field::Complex ? "complex" : "real"; }

Field parse_field(const std::string &s) {
  if (s == "complex") return Field::Complex;
  if (s == "real") return Field::Real;
  throw ParseError("unknown field '" + s + "' (expected complex or real)");
}

StabilityRegion parse_region(const std::string &s) {
  if (s == "hurwitz") return StabilityRegion::Hurwitz;
  if (s == "schur") return StabilityRegion::Schur;
  throw ParseError("unknown region '" + s + "' (expected hurwitz or schur)");
}

InitKind parse_init(const std::string &s) {
  if (s == "identity") return InitKind::Identity;
  if (s == "random") return InitKind::Random;
  throw ParseError("unknown init '" + s + "' (expected identity or random)");
}

json pencil_to_json(const Pencil<double> &P) { return pencil_json(P); }
json pencil_to_json(const Pencil<Complex> &P) { return pencil_json(P); }

AnyPencil pencil_from_json(const json &j) {
  if (!j.is_object()) throw ParseError("pencil must be a JSON object");
  if (!j.contains("n") || !j.at("n").is_number_integer()) throw ParseError("pencil needs an integer 'n'");
  const auto n = j.at("n").get<long long>();
  if (n < 1) throw ParseError("'n' must be positive");
  if (!j.contains("field") || !j.at("field").is_string()) throw ParseError("pencil needs a string 'field'");
  const Field field = parse_field(j.at("field").get<std::string>());
  const Index m = static_cast<Index>(n);
  const Eigen::MatrixXd Are = matrix_from_array(j, "A_re", m);
  const Eigen::MatrixXd Bre = matrix_from_array(j, "B_re", m);
  if (field == Field::Real) {
    if (j.contains("A_im") || j.contains("B_im")) throw ParseError("real pencil must not carry imaginary arrays");
    return Pencil<double>{Are, Bre};
  }
  const Eigen::MatrixXd Aim = matrix_from_array(j, "A_im", m);
  const Eigen::MatrixXd Bim = matrix_from_array(j, "B_im", m);
  Matrix<Complex> A(m, m), B(m, m);
  A.real() = Are;
  A.imag() = Aim;
  B.real() = Bre;
  B.imag() = Bim;
  return Pencil<Complex>{A, B};
}

Pencil<double> as_real(const AnyPencil &P) {
  if (const auto *r = std::get_if<Pencil<double>>(&P)) return *r;
  const auto &c = std::get<Pencil<Complex>>(P);
  if (c.A.imag().cwiseAbs().maxCoeff() != 0.0 || c.B.imag().cwiseAbs().maxCoeff() != 0.0)
    throw ValidationError("pencil has nonzero imaginary parts; cannot use the real field");
  return {c.A.real(), c.B.real()};
}

Pencil<Complex> as_complex(const AnyPencil &P) {
  if (const auto *c = std::get_if<Pencil<Complex>>(&P)) return *c;
  const auto &r = std::get<Pencil<double>>(P);
  return {r.A.cast<Complex>(), r.B.cast<Complex>()};
}

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return ss.str();
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

AnyPencil read_pencil_file(const std::filesystem::path &path) {
  const std::string text = read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return pencil_from_json(j);
}

void write_pencil_file(const std::filesystem::path &path, const AnyPencil &P) {
  const json j = std::visit([](const auto &p) { return pencil_json(p); }, P);
  write_text(path, j.dump(1) + "\n");
}

json projection_to_json(const ScalarPencil &input, const ProjectionResult &r) {
  json j;
  j["input"] = complex_pair_json(input.a, input.b);
  j["projected"] = complex_pair_json(r.projected.a, r.projected.b);
  j["residual_distance"] = r.residual_distance;
  j["on_medial_axis"] = r.on_medial_axis;
  j["lambda"] = r.lambda ? json(*r.lambda) : json(nullptr);
  j["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
  return j;
}

json record_to_json(const SolveRecord<double> &rec) { return record_json(rec); }
json record_to_json(const SolveRecord<Complex> &rec) { return record_json(rec); }

ResultFile result_from_json(const json &j) {
  try {
    ResultFile r;
    r.region = parse_region(j.at("region").get<std::string>());
    r.input = pencil_from_json(j.at("input"));
    r.pencil = pencil_from_json(j.at("pencil"));
    r.triangular = pencil_from_json(j.at("triangular"));
    r.squared_distance = j.at("squared_distance").get<double>();
    r.stability = j.at("stability").get<std::string>();
    r.stop_reason = j.at("solver").at("stop_reason").get<std::string>();
    return r;
  } catch (const json::exception &e) {
    throw ParseError(std::string("malformed result file: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace stabpencil
