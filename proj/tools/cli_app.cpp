#include "cli_app.hpp"

#include "saext/bipartite.hpp"
#include "saext/boundary_param.hpp"
#include "saext/deficiency.hpp"
#include "saext/dirac1d.hpp"
#include "saext/numeric.hpp"
#include "saext/quadform1d.hpp"
#include "saext/serialization.hpp"
#include "saext/symmetry_reduction.hpp"

#include <CLI11.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

namespace saext::cli {

namespace {

using numeric::format_double;

[[noreturn]] void invalid(const std::string& msg) { throw ValidationError(msg); }

class Params {
 public:
  Params(const Json& j, std::initializer_list<const char*> allowed) : j_(j) {
    if (!j.is_object()) invalid("params must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
      if (!ok.count(key)) invalid("unknown parameter '" + key + "'");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& raw(const char* key) const {
    if (!has(key)) invalid(std::string("missing parameter '") + key + "'");
    return j_[key];
  }

  double number(const char* key) const { return to_number(raw(key), key); }
  double number_or(const char* key, double def) const { return has(key) ? number(key) : def; }

  long integer(const char* key) const { return to_integer(raw(key), key); }
  long integer_or(const char* key, long def) const { return has(key) ? integer(key) : def; }

  /// Array of finite numbers, or {"start", "stop", "count"} (inclusive linspace).
  std::vector<double> numbers(const char* key) const {
    const Json& v = raw(key);
    std::vector<double> out;
    if (v.is_array()) {
      for (const auto& x : v) out.push_back(to_number(x, key));
      return out;
    }
    if (v.is_object()) {
      Params lin(v, {"start", "stop", "count"});
      const double a = lin.number("start"), b = lin.number("stop");
      const long n = lin.integer("count");
      if (n < 1 || n > 1000000) invalid(std::string(key) + ".count must be in [1, 1e6]");
      for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1));
      return out;
    }
    invalid(std::string(key) + " must be an array of numbers or a {start, stop, count} object");
  }

  static double to_number(const Json& v, const std::string& key) {
    if (!v.is_number()) invalid(key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) invalid(key + " must be finite");
    return x;
  }

  static long to_integer(const Json& v, const std::string& key) {
    if (v.is_number_integer()) return v.get<long>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15) return static_cast<long>(x);
    }
    invalid(key + " must be an integer");
  }

 private:
  const Json& j_;
};

// Library errors raised while interpreting inputs count as validation failures.
template <class F>
auto validating(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
}

BoundaryUnitary parse_boundary(const Json& j, int dim) {
  return validating([&] {
    if (j.is_string()) {
      const std::string s = j.get<std::string>();
      if (s == "dirichlet") return named_condition(Dirichlet{}, dim);
      if (s == "neumann") return named_condition(Neumann{}, dim);
      invalid("unknown boundary name '" + s + "' (dirichlet | neumann, or an object)");
    }
    if (!j.is_object()) invalid("boundary must be a name or an object");
    if (j.contains("kind")) {
      const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
      if (kind == "dirichlet" || kind == "neumann") {
        Params p(j, {"kind"});
        return named_condition(kind == "dirichlet" ? NamedCondition{Dirichlet{}} : NamedCondition{Neumann{}}, dim);
      }
      if (kind == "robin") {
        Params p(j, {"kind", "c"});
        return named_condition(Robin{p.number("c")}, dim);
      }
      if (kind == "quasi_periodic") {
        Params p(j, {"kind", "tau"});
        if (dim != 2) invalid("quasi_periodic needs a two-point boundary");
        return named_condition(QuasiPeriodic{p.number("tau")}, dim);
      }
      invalid("unknown boundary kind '" + kind + "'");
    }
    return boundary_unitary_from_json(j);
  });
}

std::vector<double> parse_lambdas(const Params& p, const char* key) {
  std::vector<double> l = p.numbers(key);
  for (std::size_t k = 1; k < l.size(); ++k)
    if (!(l[k] < l[k - 1])) invalid(std::string(key) + " must be sorted strictly descending");
  return l;
}

struct Result {
  Json json;
  std::string csv;
};

std::string spectrum_csv(const SpectralResult& r) {
  std::string s = "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
    s += std::to_string(i) + "," + format_double(r.eigenvalues[i]) + "," + format_double(r.residuals[i]) + "\n";
  return s;
}

std::string key_value_csv(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s = "key,value\n";
  for (const auto& [k, v] : kv) s += k + "," + v + "\n";
  return s;
}

std::string bound_state_row(double s, const BipartiteBoundState& st) {
  std::string row = format_double(s);
  for (double x : {st.alpha1, st.alpha2, st.energy, st.kappa1, st.kappa2, st.schmidt[0], st.schmidt[1], st.entropy})
    row += "," + format_double(x);
  return row + ",ok\n";
}

const char* kBipartiteHeader = "s,alpha1,alpha2,E,kappa1,kappa2,schmidt1,schmidt2,entropy,flag\n";

void require(bool cond, const std::string& msg) {
  if (!cond) invalid(msg);
}

using Runner = std::function<Result()>;

Runner prepare_spectrum(const Json& j) {
  Params p(j, {"L", "n_elements", "boundary", "potential", "n_eigs"});
  const double L = p.number("L");
  const long n = p.integer("n_elements");
  const long n_eigs = p.integer_or("n_eigs", 10);
  require(L > 0, "L must be > 0");
  require(n >= 4 && n <= 4000, "n_elements must be in [4, 4000]");
  require(n_eigs >= 1 && n_eigs <= n - 1, "n_eigs must be in [1, n_elements - 1]");
  std::vector<double> potential;
  if (p.has("potential")) {
    potential = p.numbers("potential");
    require(static_cast<long>(potential.size()) == n + 1, "potential must have n_elements + 1 samples");
  }
  const BoundaryUnitary bu = parse_boundary(p.raw("boundary"), 2);
  require(bu.dim() == 2, "spectrum needs a 2 x 2 boundary unitary");
  return [=] {
    const SpectralResult r = solve(assemble(L, static_cast<int>(n), bu, potential), static_cast<int>(n_eigs));
    return Result{to_json(r), spectrum_csv(r)};
  };
}

Runner prepare_deficiency(const Json& j) {
  Params p(j, {"domain", "extent", "grid_n", "lambdas"});
  const std::string domain = p.raw("domain").is_string() ? p.raw("domain").get<std::string>() : "";
  require(domain == "half_line" || domain == "interval", "domain must be \"half_line\" or \"interval\"");
  const double extent = p.number("extent");
  const long grid_n = p.integer("grid_n");
  require(extent > 0, "extent must be > 0");
  require(grid_n >= 100 && grid_n <= 200000, "grid_n must be in [100, 200000]");
  const bool bip = p.has("lambdas");
  const std::vector<double> lambdas = bip ? parse_lambdas(p, "lambdas") : std::vector<double>{};
  return [=] {
    DeficiencyPair pair = domain == "half_line" ? half_line_laplacian_deficiency(extent, static_cast<int>(grid_n))
                                                : interval_laplacian_deficiency(extent, static_cast<int>(grid_n));
    if (bip) pair = bipartite_deficiency(pair, lambdas);
    Json out = to_json(pair);
    Json res_plus = Json::array(), res_minus = Json::array();
    for (const auto& v : pair.basis_plus) res_plus.push_back(defining_residual(pair, v, +1));
    for (const auto& v : pair.basis_minus) res_minus.push_back(defining_residual(pair, v, -1));
    out["residuals_plus"] = res_plus;
    out["residuals_minus"] = res_minus;
    std::string csv = "space,k,component,x,re,im\n";
    const Eigen::Index n = pair.grid.size();
    for (int sp = 0; sp < 2; ++sp) {
      const auto& basis = sp == 0 ? pair.basis_plus : pair.basis_minus;
      for (std::size_t k = 0; k < basis.size(); ++k)
        for (int c = 0; c < pair.components; ++c)
          for (Eigen::Index i = 0; i < n; ++i) {
            const cplx z = basis[k](c * n + i);
            csv += std::string(sp == 0 ? "plus," : "minus,") + std::to_string(k) + "," + std::to_string(c) + "," +
                   format_double(pair.grid(i)) + "," + format_double(z.real()) + "," + format_double(z.imag()) + "\n";
          }
    }
    return Result{out, csv};
  };
}

Runner prepare_curve(const Json& j) {
  Params p(j, {"sigma", "alpha1"});
  const double sigma = p.number("sigma");
  require(sigma >= 0, "sigma must be >= 0");
  const std::vector<double> a1 = p.numbers("alpha1");
  return [=] {
    const CompatibilityCurve c = compatibility_curve(sigma, a1);
    Json pts = Json::array(), om = Json::array();
    std::string csv = "alpha1,alpha2\n";
    for (const auto& pt : c.points) {
      pts.push_back({{"alpha1", pt.alpha1}, {"alpha2", pt.alpha2}});
      csv += format_double(pt.alpha1) + "," + format_double(pt.alpha2) + "\n";
    }
    for (const auto& o : c.omitted) om.push_back({{"alpha1", o.alpha1}, {"reason", o.reason}});
    return Result{Json{{"sigma", sigma}, {"points", pts}, {"omitted", om}}, csv};
  };
}

BipartiteSystem parse_system(const Params& p) {
  const double l1 = p.number("lambda1"), l2 = p.number("lambda2");
  require(l1 >= l2, "lambda1 must be >= lambda2");
  return BipartiteSystem::make(l1, l2);
}

std::pair<double, double> parse_amplitudes(const Params& p) {
  const double c1 = p.number_or("c1", 1.0), c2 = p.number_or("c2", 1.0);
  require(c1 > 0 && c2 > 0, "amplitudes c1, c2 must be > 0");
  return {c1, c2};
}

Runner prepare_bound(const Json& j) {
  Params p(j, {"lambda1", "lambda2", "alpha1", "c1", "c2"});
  const BipartiteSystem sys = parse_system(p);
  const double a1 = p.number("alpha1");
  const auto [c1, c2] = parse_amplitudes(p);
  return [=] {
    const BipartiteBoundState st = bound_state(sys, a1, c1, c2);
    return Result{to_json(st), std::string(kBipartiteHeader) + bound_state_row(0.5 * a1, st)};
  };
}

Runner prepare_adiabatic(const Json& j) {
  Params p(j, {"lambda1", "lambda2", "s", "c1", "c2"});
  const BipartiteSystem sys = parse_system(p);
  const std::vector<double> s = p.numbers("s");
  const auto [c1, c2] = parse_amplitudes(p);
  return [=] {
    const auto path = adiabatic_path(sys, s, c1, c2);
    Json arr = Json::array();
    std::string csv = kBipartiteHeader;
    for (const auto& ps : path) {
      Json e{{"s", ps.s}, {"flag", std::string(to_string(ps.flag))}};
      if (ps.state) {
        e["state"] = to_json(*ps.state);
        csv += bound_state_row(ps.s, *ps.state);
      } else {
        csv += format_double(ps.s) + "," + format_double(2.0 * ps.s) + ",,,,,,,," + std::string(to_string(ps.flag)) + "\n";
      }
      arr.push_back(e);
    }
    return Result{Json{{"samples", arr}}, csv};
  };
}

Runner prepare_separability(const Json& j) {
  Params p(j, {"lambda1", "lambda2", "boundary", "evolve_time", "length", "n_elements", "n_times"});
  const BipartiteSystem sys = parse_system(p);
  const BoundaryUnitary bu = parse_boundary(p.raw("boundary"), 2);
  require(bu.dim() == 2 || bu.dim() == 4, "separability needs a 2 x 2 or 4 x 4 boundary unitary");
  const double t = p.number("evolve_time");
  require(t >= 0, "evolve_time must be >= 0");
  SeparabilityOptions opts;
  opts.length = p.number_or("length", opts.length);
  opts.n_elements = static_cast<int>(p.integer_or("n_elements", opts.n_elements));
  opts.n_times = static_cast<int>(p.integer_or("n_times", opts.n_times));
  require(opts.length > 0, "length must be > 0");
  require(opts.n_elements >= 4 && opts.n_elements <= 2000, "n_elements must be in [4, 2000]");
  require(opts.n_times >= 1 && opts.n_times <= 10000, "n_times must be in [1, 10000]");
  require(!bu.no_gap(), "boundary unitary has no gap");
  return [=] {
    const SeparabilityResult r = separability_test(sys, bu, t, opts);
    std::string csv = "time,entropy\n";
    for (std::size_t k = 0; k < r.times.size(); ++k)
      csv += format_double(r.times[k]) + "," + format_double(r.entropies[k]) + "\n";
    return Result{Json{{"verdict", r.separable ? "separable" : "entangling"},
                       {"max_entropy", r.max_entropy},
                       {"times", r.times},
                       {"entropies", r.entropies}},
                  csv};
  };
}

Runner prepare_dirac_circle(const Json& j) {
  Params p(j, {"n_modes"});
  const long n = p.integer("n_modes");
  require(n >= 0 && n <= 500, "n_modes must be in [0, 500]");
  return [=] {
    const SpectralResult r = circle_dirac_spectrum(static_cast<int>(n));
    return Result{to_json(r), spectrum_csv(r)};
  };
}

Runner prepare_dirac_interval(const Json& j) {
  Params p(j, {"L", "u_map", "n_eigs", "bracket"});
  const double L = p.number("L");
  require(L > 0, "L must be > 0");
  const long n_eigs = p.integer_or("n_eigs", 0);
  require(n_eigs >= 0, "n_eigs must be >= 0");
  const std::vector<double> br = p.numbers("bracket");
  require(br.size() == 2 && br[0] < br[1], "bracket must be [lo, hi] with lo < hi");
  const DiracBoundarySetup setup =
      validating([&] { return DiracBoundarySetup::interval(matrix_from_json(p.raw("u_map"), 2, 2)); });
  return [=] {
    const SpectralResult r = interval_dirac_spectrum(L, setup, static_cast<int>(n_eigs), {br[0], br[1]});
    Json out = to_json(r);
    out["setup"] = to_json(setup);
    return Result{out, spectrum_csv(r)};
  };
}

Runner prepare_poa(const Json& j, std::uint64_t seed) {
  Params p(j, {"kind", "grid", "weights", "n_fourier", "q_matrix", "p_plus", "n_pairs"});
  const std::string kind = p.raw("kind").is_string() ? p.raw("kind").get<std::string>() : "";
  const long n_pairs = p.integer_or("n_pairs", 100);
  require(n_pairs >= 1 && n_pairs <= 100000, "n_pairs must be in [1, 1e5]");
  SectorSplit split;
  if (kind == "position") {
    for (const char* k : {"n_fourier", "q_matrix", "p_plus"}) require(!p.has(k), std::string(k) + " is not a position parameter");
    const auto grid = p.numbers("grid");
    const auto w = p.has("weights") ? p.numbers("weights") : std::vector<double>{};
    split = validating([&] { return sector_split_position(grid, w); });
  } else if (kind == "momentum") {
    for (const char* k : {"grid", "weights", "q_matrix", "p_plus"}) require(!p.has(k), std::string(k) + " is not a momentum parameter");
    const long nf = p.integer("n_fourier");
    require(nf >= 1 && nf % 2 == 1 && nf <= 1001, "n_fourier must be odd and in [1, 1001]");
    split = sector_split_momentum(static_cast<int>(nf));
  } else if (kind == "custom") {
    for (const char* k : {"grid", "weights", "n_fourier"}) require(!p.has(k), std::string(k) + " is not a custom parameter");
    const CMatrix q = validating([&] { return square_matrix_from_json(p.raw("q_matrix")); });
    const CMatrix pp = validating([&] { return square_matrix_from_json(p.raw("p_plus")); });
    require(q.rows() == pp.rows(), "q_matrix and p_plus must have equal size");
    // NotAdditive is a numerical verdict, so only shape errors count as validation here.
    try {
      split = sector_split_custom(q, pp);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotAdditive) {
        const Error copy = e;
        return [copy]() -> Result { throw copy; };
      }
      throw ValidationError(e.what());
    }
  } else {
    invalid("kind must be \"position\", \"momentum\" or \"custom\"");
  }
  return [=] {
    std::mt19937_64 rng(seed);
    double poa = 0.0;
    const auto n = static_cast<int>(split.q_matrix.rows());
    for (long k = 0; k < n_pairs; ++k) {
      const CVector a = split.p_plus * numeric::random_cvector(n, rng);
      const CVector b = split.p_minus * numeric::random_cvector(n, rng);
      const cplx lhs = form_value(split, a + b, a + b);
      const cplx rhs = form_value(split, a, a) + form_value(split, b, b);
      poa = std::max(poa, std::abs(lhs - rhs) / std::max(1.0, (a + b).squaredNorm()));
    }
    const ReconstructedOperator rec = reconstruct_operator(split, 50, seed);
    const auto eigs = [](const CMatrix& t) {
      std::vector<double> v;
      if (t.rows() == 0) return v;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(t, Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < t.rows(); ++i) v.push_back(es.eigenvalues()(i));
      return v;
    };
    const auto plus = eigs(split.t_plus), minus = eigs(split.t_minus);
    std::string csv = "sector,index,eigenvalue\n";
    for (std::size_t i = 0; i < plus.size(); ++i) csv += "plus," + std::to_string(i) + "," + format_double(plus[i]) + "\n";
    for (std::size_t i = 0; i < minus.size(); ++i) csv += "minus," + std::to_string(i) + "," + format_double(minus[i]) + "\n";
    Json out{{"sector_plus_eigenvalues", plus},
             {"sector_minus_eigenvalues", minus},
             {"additivity_defect", poa},
             {"lambda_min_plus", split.lambda_min_plus},
             {"lambda_max_minus", split.lambda_max_minus},
             {"reconstruction",
              {{"hermiticity_defect", rec.hermiticity_defect},
               {"representation_defect", rec.representation_defect},
               {"verified", rec.verified}}}};
    return Result{out, csv};
  };
}

Runner prepare_commutant(const Json& j, std::uint64_t seed) {
  Params p(j, {"n_modes", "radial_dim", "samples", "unitary", "n_random"});
  const long n_modes = p.integer_or("n_modes", kDefaultFourierModes);
  require(n_modes >= 0 && n_modes <= 64, "n_modes must be in [0, 64]");
  const long n_random = p.integer_or("n_random", 20);
  require(n_random >= 1 && n_random <= 10000, "n_random must be in [1, 1e4]");
  const std::vector<double> samples =
      p.has("samples") ? p.numbers("samples") : std::vector<double>{0.0, kPi / 3.0, 1.0, 2.5};
  require(!samples.empty(), "samples must not be empty");
  const Json& u = p.raw("unitary");
  if (!u.is_object()) invalid("unitary must be an object");
  CMatrix matrix;
  long radial = p.integer_or("radial_dim", 1);
  std::optional<AdmissibleUnitary> adm;
  if (u.contains("admissible")) {
    Params up(u, {"admissible"});
    Params ap(u["admissible"], {"radial_factor", "phases"});
    const CMatrix rf = validating([&] { return square_matrix_from_json(ap.raw("radial_factor")); });
    const auto phases = ap.numbers("phases");
    require(static_cast<long>(phases.size()) == 2 * n_modes + 1, "phases must have length 2 n_modes + 1");
    radial = rf.rows();
    adm = validating([&] { return build_admissible(rf, phases); });
    matrix = adm->assembled;
  } else {
    Params up(u, {"matrix", "convention"});
    matrix = validating([&] { return boundary_unitary_from_json(u).matrix(); });
  }
  require(radial >= 1, "radial_dim must be >= 1");
  require(matrix.rows() == (2 * n_modes + 1) * radial,
          "unitary must have dimension (2 n_modes + 1) * radial_dim");
  const GroupRep rep = GroupRep::u1(static_cast<int>(n_modes), static_cast<int>(radial), samples);
  return [=] {
    const CommutantResult c = commutant_check(matrix, rep);
    const FormInvarianceReport f = invariance_of_form_check(matrix, rep, static_cast<int>(n_random), seed);
    Json out{{"max_norm", c.max_norm},
             {"commutant_pass", c.pass},
             {"form_defect", f.max_defect},
             {"form_pass", f.pass},
             {"negative_control_defect", f.negative_control_defect}};
    if (adm) {
      out["gap_delta"] = adm->gap_delta;
      out["has_gap"] = adm->has_gap;
    }
    std::vector<std::pair<std::string, std::string>> kv{{"max_norm", format_double(c.max_norm)},
                                                        {"commutant_pass", c.pass ? "true" : "false"},
                                                        {"form_defect", format_double(f.max_defect)},
                                                        {"form_pass", f.pass ? "true" : "false"},
                                                        {"negative_control_defect", format_double(f.negative_control_defect)}};
    return Result{out, key_value_csv(kv)};
  };
}

Runner prepare_disk(const Json& j) {
  Params p(j, {"modes", "robin_c", "n_elements", "n_eigs", "n_modes"});
  const long n_modes = p.integer_or("n_modes", kDefaultFourierModes);
  require(n_modes >= 0, "n_modes must be >= 0");
  std::vector<long> modes;
  for (double m : p.numbers("modes")) {
    require(m == std::floor(m), "modes must be integers");
    require(std::abs(m) <= n_modes, "|m| must not exceed n_modes");
    modes.push_back(static_cast<long>(m));
  }
  double c;
  const Json& rc = p.raw("robin_c");
  if (rc.is_string()) {
    require(rc.get<std::string>() == "dirichlet", "robin_c must be a number or \"dirichlet\"");
    c = -std::numeric_limits<double>::infinity();
  } else {
    c = Params::to_number(rc, "robin_c");
  }
  const long n = p.integer("n_elements");
  require(n >= 8 && n <= 4000, "n_elements must be in [8, 4000]");
  const long n_eigs = p.integer_or("n_eigs", 3);
  require(n_eigs >= 1 && n_eigs <= n - 1, "n_eigs must be in [1, n_elements - 1]");
  return [=] {
    std::string csv = "m,index,eigenvalue,residual\n";
    Json arr = Json::array();
    for (long m : modes) {
      const SpectralResult r = disk_mode_spectrum(static_cast<int>(m), c, static_cast<int>(n), static_cast<int>(n_eigs),
                                                  static_cast<int>(n_modes));
      for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
        csv += std::to_string(m) + "," + std::to_string(i) + "," + format_double(r.eigenvalues[i]) + "," +
               format_double(r.residuals[i]) + "\n";
      Json e = to_json(r);
      e["m"] = m;
      arr.push_back(e);
    }
    return Result{Json{{"modes", arr}}, csv};
  };
}

Runner prepare_corner(const Json& j) {
  Params p(j, {"theta_opening", "epsilon", "n_quad"});
  const double theta = p.number("theta_opening");
  const double eps = p.number_or("epsilon", 1e-2);
  const long n_quad = p.integer_or("n_quad", 1000);
  require(theta > 0 && theta < 2 * kPi, "theta_opening must lie in (0, 2 pi)");
  require(eps > 0 && eps < 0.1, "epsilon must lie in (0, 0.1)");
  require(n_quad >= 1000 && n_quad <= 20000, "n_quad must be in [1000, 20000]");
  return [=] {
    const CornerReport r = corner_singularity(theta, eps, static_cast<int>(n_quad));
    std::vector<std::pair<std::string, std::string>> kv{
        {"theta_opening", format_double(r.theta_opening)},
        {"exponent", format_double(r.exponent)},
        {"harmonic_residual", format_double(r.harmonic_residual)},
        {"edge_trace_max", format_double(r.edge_trace_max)},
        {"slope", format_double(r.slope)},
        {"h2_class", r.h2_class == H2Class::Finite ? "finite" : "divergent"}};
    if (r.h2_class == H2Class::Finite)
      kv.emplace_back("h2_value", format_double(r.h2_value));
    else
      kv.emplace_back("divergence_rate", format_double(r.divergence_rate));
    return Result{to_json(r), key_value_csv(kv)};
  };
}

Runner prepare_check_gap(const Json& j) {
  Params p(j, {"boundary", "dim"});
  const long dim = p.integer_or("dim", 2);
  require(dim >= 1 && dim <= 512, "dim must be in [1, 512]");
  const BoundaryUnitary bu = parse_boundary(p.raw("boundary"), static_cast<int>(dim));
  return [=] {
    Json out{{"gap_delta", bu.gap_delta()},
             {"w_dim", bu.w_basis().cols()},
             {"no_gap", bu.no_gap()},
             {"dim", bu.dim()},
             {"eigen_angles", bu.eigen_angles()},
             {"cayley", matrix_to_json(bu.cayley())},
             {"boundary", to_json(bu)}};
    std::vector<std::pair<std::string, std::string>> kv{{"gap_delta", format_double(bu.gap_delta())},
                                                        {"w_dim", std::to_string(bu.w_basis().cols())},
                                                        {"no_gap", bu.no_gap() ? "true" : "false"},
                                                        {"dim", std::to_string(bu.dim())}};
    return Result{out, key_value_csv(kv)};
  };
}

const std::map<std::string, std::string>& default_formats() {
  static const std::map<std::string, std::string> f{
      {"spectrum", "csv"},   {"deficiency", "json"},     {"bipartite-curve", "csv"},    {"bipartite-bound", "csv"},
      {"adiabatic", "csv"},  {"separability", "json"},   {"dirac-circle", "csv"},       {"dirac-interval", "csv"},
      {"poa", "json"},       {"symmetry-commutant", "json"}, {"disk-modes", "csv"},     {"corner", "json"},
      {"check-gap", "json"}};
  return f;
}

Runner prepare(const std::string& command, const Json& params, const Overrides& o) {
  if (command == "spectrum") return prepare_spectrum(params);
  if (command == "deficiency") return prepare_deficiency(params);
  if (command == "bipartite-curve") return prepare_curve(params);
  if (command == "bipartite-bound") return prepare_bound(params);
  if (command == "adiabatic") return prepare_adiabatic(params);
  if (command == "separability") return prepare_separability(params);
  if (command == "dirac-circle") return prepare_dirac_circle(params);
  if (command == "dirac-interval") return prepare_dirac_interval(params);
  if (command == "poa") return prepare_poa(params, o.seed);
  if (command == "symmetry-commutant") return prepare_commutant(params, o.seed);
  if (command == "disk-modes") return prepare_disk(params);
  if (command == "corner") return prepare_corner(params);
  if (command == "check-gap") return prepare_check_gap(params);
  invalid("unknown command '" + command + "'");
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

void report(std::ostream& err, int code, std::string_view kind, const std::string& msg) {
  err << "error exit=" << code << " code=" << kind << " message=" << one_line(msg) << "\n";
}

}  // namespace

void write_atomically(const std::string& path, const std::string& body) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
    f << body;
    f.flush();
    if (!f) throw ValidationError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ValidationError("cannot rename onto '" + path + "': " + ec.message());
  }
}

Artifact execute(const std::string& config_text, const Overrides& overrides) {
  Json cfg;
  try {
    cfg = Json::parse(config_text);
  } catch (const Json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) invalid("config must be a JSON object");
  for (const auto& [key, _] : cfg.items())
    if (key != "schema" && key != "command" && key != "params" && key != "output")
      invalid("unknown top-level field '" + key + "'");
  if (!cfg.contains("schema") || !cfg["schema"].is_number_integer() || cfg["schema"].get<long>() != 1)
    invalid("\"schema\" must be 1");
  if (!cfg.contains("command") || !cfg["command"].is_string()) invalid("\"command\" must be a string");
  const std::string command = cfg["command"].get<std::string>();
  const Json params = cfg.contains("params") ? cfg["params"] : Json::object();

  Artifact art;
  const auto fit = default_formats().find(command);
  art.format = fit == default_formats().end() ? "csv" : fit->second;
  if (cfg.contains("output")) {
    const Json& out = cfg["output"];
    Params op(out, {"format", "path"});
    if (op.has("format")) {
      if (!out["format"].is_string()) invalid("output.format must be a string");
      art.format = out["format"].get<std::string>();
    }
    if (op.has("path")) {
      if (!out["path"].is_string() || out["path"].get<std::string>().empty())
        invalid("output.path must be a non-empty string");
      art.path = out["path"].get<std::string>();
    }
  }
  if (overrides.format) art.format = *overrides.format;
  if (overrides.output_path) art.path = *overrides.output_path;
  if (art.format != "csv" && art.format != "json") invalid("format must be \"csv\" or \"json\"");
  if (overrides.threads < 1) invalid("--threads must be >= 1");

  const Runner runner = prepare(command, params, overrides);
  const Result r = runner();
  art.body = art.format == "csv" ? r.csv : r.json.dump(2) + "\n";
  return art;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-adjoint extension toolkit", "saext"};
  std::string config_path, output_path, format;
  bool use_stdin = false;
  std::uint64_t seed = 0;
  int threads = 1;
  auto* cfg_opt = app.add_option("--config", config_path, "Problem definition (JSON)");
  auto* stdin_opt = app.add_flag("--stdin", use_stdin, "Read the problem definition from standard input");
  cfg_opt->excludes(stdin_opt);
  auto* out_opt = app.add_option("--output", output_path, "Write the result here (atomically) instead of stdout");
  auto* fmt_opt = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "Seed for randomized checks");
  app.add_option("--threads", threads, "Worker threads (>= 1)")->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report(err, kExitValidation, "Usage", e.what());
    return kExitValidation;
  }
  if (config_path.empty() && !use_stdin) {
    report(err, kExitValidation, "Usage", "one of --config or --stdin is required");
    return kExitValidation;
  }

  try {
    std::string text;
    if (use_stdin) {
      text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    } else {
      std::ifstream f(config_path, std::ios::binary);
      if (!f) invalid("cannot read config '" + config_path + "'");
      text.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }
    Overrides o;
    if (*out_opt) o.output_path = output_path;
    if (*fmt_opt) o.format = format;
    o.seed = seed;
    o.threads = threads;
    const Artifact art = execute(text, o);
    if (art.path)
      write_atomically(*art.path, art.body);
    else
      out << art.body;
    return kExitOk;
  } catch (const ValidationError& e) {
    report(err, kExitValidation, "Validation", e.message);
    return kExitValidation;
  } catch (const Error& e) {
    const bool precondition = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::DimensionMismatch;
    const int code = precondition ? kExitValidation : kExitNumerical;
    report(err, code, to_string(e.code()), e.what());
    return code;
  } catch (const std::exception& e) {
    report(err, kExitNumerical, "Internal", e.what());
    return kExitNumerical;
  }
}

}  // namespace saext::cli
