#ifndef QUADHAM_TOOLS_CLI_HPP
#define QUADHAM_TOOLS_CLI_HPP

// Command-line front end: probe, sweep, decompose, validate. CSV on stdout or --out.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "quadham/quadham.hpp"

namespace quadham::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kInvalidInput = 2, kIoError = 3, kSingular = 4 };

struct RunConfig {
  std::string model = "fc";
  double k = 1.0, delta = 0.0;
  double gs = 0.6, ga = 0.4, ks = 0.3, ka = 0.1;
  double g1 = 1.0, g2 = 0.5, g3 = 0.25;
  std::string initial;  // empty: model default
  std::string final_state;
  double t = 1.0;
  double t0 = 0.0, t1 = 1.0;
  int steps = 20;
  int nmax = 0;  // 0: model default
  double dt = 0.05;
  std::string out;
};

inline std::string num(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline FockState parse_state(const std::string& text) {
  FockState s;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int v = 0;
    const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size() || v < 0)
      throw model_error("invalid occupation tuple '" + text + "'");
    s.push_back(v);
  }
  if (s.empty()) throw model_error("empty occupation tuple");
  return s;
}

inline ModelSpec make_spec(const RunConfig& c) {
  ModelSpec s;
  switch (model_from_string(c.model)) {
    case ModelId::FrequencyConverter: s = ModelSpec::frequency_converter(c.k, c.delta); break;
    case ModelId::ParametricAmplifier: s = ModelSpec::parametric_amplifier(c.k, c.delta); break;
    case ModelId::Raman: s = ModelSpec::raman(c.gs, c.ga, c.ks, c.ka); break;
    case ModelId::SU3Hypothetical: s = ModelSpec::su3(c.g1, c.g2, c.g3); break;
  }
  s.validate();
  return s;
}

inline std::pair<FockState, FockState> states(const RunConfig& c, const ModelSpec& spec) {
  FockState i, f;
  switch (spec.model) {
    case ModelId::FrequencyConverter: i = {1, 0}, f = {0, 1}; break;
    case ModelId::ParametricAmplifier: i = {0, 0}, f = {1, 1}; break;
    case ModelId::Raman: i = {0, 0, 0}, f = {1, 1, 0}; break;
    case ModelId::SU3Hypothetical: i = {1, 0, 0}, f = {0, 1, 0}; break;
  }
  if (!c.initial.empty()) i = parse_state(c.initial);
  if (!c.final_state.empty()) f = parse_state(c.final_state);
  for (const FockState* s : {&i, &f})
    if (s->size() != spec.n_modes())
      throw model_error("state " + to_string(*s) + " needs " + std::to_string(spec.n_modes()) + " occupations");
  return {i, f};
}

inline int default_nmax(ModelId m) {
  switch (m) {
    case ModelId::FrequencyConverter: return 8;
    case ModelId::ParametricAmplifier: return 60;
    case ModelId::Raman: return 14;
    case ModelId::SU3Hypothetical: return 8;
  }
  return 8;
}

inline int oracle_nmax(const RunConfig& c, const ModelSpec& spec) {
  return c.nmax > 0 ? c.nmax : default_nmax(spec.model);
}

// Writes to --out when given, otherwise to the stream.
inline int emit(const RunConfig& c, const std::string& text, std::ostream& out, std::ostream& err) {
  if (c.out.empty()) {
    out << text;
    return kOk;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) {
    err << "error: cannot open '" << c.out << "' for writing\n";
    return kIoError;
  }
  f << text;
  f.close();
  if (!f) {
    err << "error: write to '" << c.out << "' failed\n";
    return kIoError;
  }
  return kOk;
}

inline int probe(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = make_spec(c);
  const auto [i, f] = states(c, spec);
  TransitionResult r = closed_form(spec, i, f, c.t);
  r.prob_oracle = oracle_probability(spec, i, f, c.t, oracle_nmax(c, spec));
  std::string s = "t,prob_closed,prob_oracle,abs_err,prob_closed_printed,note\n";
  s += num(c.t) + "," + num(r.prob_closed) + "," + num(*r.prob_oracle) + "," +
       num(std::abs(r.prob_closed - *r.prob_oracle)) + "," + num(r.prob_closed_printed) + "," + csv_field(r.note) + "\n";
  return emit(c, s, out, err);
}

inline int sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!(c.t1 > c.t0)) throw model_error("sweep needs t1 > t0");
  if (c.steps < 1) throw model_error("sweep needs steps >= 1");
  const ModelSpec spec = make_spec(c);
  const auto [i, f] = states(c, spec);
  const TransitionOracle oracle(spec, i, oracle_nmax(c, spec));
  const auto n = static_cast<std::size_t>(c.steps) + 1;
  std::vector<std::string> rows(n);
  std::vector<std::exception_ptr> errors(n);
  auto point = [&](std::size_t j) {
    try {
      const double t = c.t0 + (c.t1 - c.t0) * static_cast<double>(j) / c.steps;
      const double pc = closed_form(spec, i, f, t).prob_closed;
      const double po = oracle.probability(f, t);
      rows[j] = num(t) + "," + num(pc) + "," + num(po) + "," + num(std::abs(pc - po)) + "\n";
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t j = w; j < n; j += workers) point(j);
    });
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::string s = "t,prob_closed,prob_oracle,abs_err\n";
  for (const auto& r : rows) s += r;
  return emit(c, s, out, err);
}

inline int decompose(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = make_spec(c);
  const InteractionForm form = reduce(spec);
  const FactoredForm f = disentangle(form, c.t);
  const double residual = verify_factorization(f, expm(form.exponent(c.t)));
  std::string s = "generator,re,im\n";
  for (const auto& fac : f.factors) s += csv_field(fac.generator) + "," + num(fac.coeff.real()) + "," + num(fac.coeff.imag()) + "\n";
  s += "residual," + num(residual) + ",0\n";
  return emit(c, s, out, err);
}

inline int validate(const RunConfig& c, bool model_given, bool list, std::ostream& out, std::ostream& err) {
  if (list) {
    std::string s;
    for (std::size_t i = 0; i < criterion_names().size(); ++i) s += std::to_string(i + 1) + " " + criterion_names()[i] + "\n";
    return emit(c, s, out, err);
  }
  ValidationOptions o;
  o.dt = c.dt;
  if (c.nmax > 0) {
    const std::optional<ModelId> m = model_given ? std::optional(model_from_string(c.model)) : std::nullopt;
    if (!m || *m == ModelId::FrequencyConverter) o.fc_nmax = c.nmax;
    if (!m || *m == ModelId::ParametricAmplifier) o.pa_nmax = c.nmax;
    if (!m || *m == ModelId::Raman) o.raman_nmax = c.nmax;
  }
  std::string s;
  bool ok = true;
  for (int id = 1; id <= 8; ++id) {
    const CriterionResult r = run_criterion(id, o);
    ok = ok && r.passed;
    s += format_line(r) + "\n";
    for (const auto& d : r.details) s += "      " + d + "\n";
  }
  s += ok ? "all criteria passed\n" : "validation FAILED\n";
  const int code = emit(c, s, out, err);
  return code != kOk ? code : (ok ? kOk : kValidationFailed);
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form transition probabilities of quadratic bosonic Hamiltonians, checked against a Fock-space oracle"};
  app.option_defaults()->always_capture_default();
  RunConfig c;
  bool dump = false, list = false;

  app.set_config("--config", "", "Read flat key = value settings (flags override)");
  app.add_option("--model", c.model, "fc | pa | raman | su3")->check(CLI::IsMember({"fc", "pa", "raman", "su3"}));
  app.add_option("--k", c.k, "Two-mode coupling");
  app.add_option("--delta", c.delta, "Two-mode effective detuning");
  app.add_option("--gs", c.gs, "Raman Stokes coupling");
  app.add_option("--ga", c.ga, "Raman anti-Stokes coupling");
  app.add_option("--ks", c.ks, "Raman Stokes detuning");
  app.add_option("--ka", c.ka, "Raman anti-Stokes detuning");
  app.add_option("--g1", c.g1, "su(3) coupling g1");
  app.add_option("--g2", c.g2, "su(3) coupling g2");
  app.add_option("--g3", c.g3, "su(3) coupling g3");
  app.add_option("--initial", c.initial, "Initial occupations a,b[,c] (Raman: v,s,a)");
  app.add_option("--final", c.final_state, "Final occupations");
  app.add_option("--t", c.t, "Time for probe and decompose");
  app.add_option("--t0", c.t0, "Sweep start");
  app.add_option("--t1", c.t1, "Sweep end");
  app.add_option("--steps", c.steps, "Sweep intervals");
  app.add_option("--nmax", c.nmax, "Oracle truncation per mode (0: model default)");
  app.add_option("--dt", c.dt, "Time step of the time-ordered evolution");
  app.add_option("--out", c.out, "Output file (default stdout)");
  app.add_flag("--dump-config", dump, "Print the effective configuration and exit")->configurable(false);
  app.add_flag("--list", list, "validate: list criteria without running")->configurable(false);

  auto* sub_probe = app.add_subcommand("probe", "One transition probability at --t");
  auto* sub_sweep = app.add_subcommand("sweep", "Probabilities over [t0, t1]");
  auto* sub_decompose = app.add_subcommand("decompose", "Disentangled factors at --t");
  auto* sub_validate = app.add_subcommand("validate", "Run the acceptance criteria");
  for (auto* s : {sub_probe, sub_sweep, sub_decompose, sub_validate}) s->fallthrough()->configurable(false);
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (dump) {
      out << app.config_to_str(true, false);
      return kOk;
    }
    if (*sub_probe) return probe(c, out, err);
    if (*sub_sweep) return sweep(c, out, err);
    if (*sub_decompose) return decompose(c, out, err);
    if (*sub_validate) return validate(c, app.count("--model") > 0, list, out, err);
    if (list) return validate(c, false, true, out, err);
    err << app.help();
    return kInvalidInput;
  } catch (const singularity_error& e) {
    err << "error: " << e.what() << " (t = " << num(e.t()) << ")\n";
    return kSingular;
  } catch (const degeneracy_error& e) {
    err << "error: " << e.what() << "\n";
    return kSingular;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
}

}  // namespace quadham::cli

#endif  // QUADHAM_TOOLS_CLI_HPP
