// Copyright 2026 The bosehub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include "bosehub/basis.hpp"
#include "bosehub/circuit.hpp"
#include "bosehub/errors.hpp"
#include "bosehub/hamiltonian.hpp"
#include "bosehub/readout.hpp"
#include "bosehub/variational.hpp"
#include "bosehub_cli/version.hpp"

namespace bosehub::cli {

std::string version() { return BOSEHUB_VERSION_STRING; }

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 1234;

struct Common {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::string out_dir = ".";
  bool check = false;
};

struct ModelOptions {
  double t = 1.0;
  double u = 0.0;
  double phi = 0.0;
  std::size_t sites = 6;
  int bosons = 5;
  std::string basis = "reduced";
  std::string order = "interaction";

  ModelParams params() const {
    ModelParams p;
    p.t = t;
    p.U = u;
    p.phi = phi;
    p.sites = sites;
    p.bosons = bosons;
    p.validate();
    return p;
  }

  json to_json() const {
    return json{{"t", t},         {"U", u},         {"phi", phi},
                {"sites", sites}, {"bosons", bosons}, {"basis", basis},
                {"phase_order", order}};
  }

  static ModelOptions from_json(const json& j) {
    ModelOptions m;
    m.t = j.at("t").get<double>();
    m.u = j.at("U").get<double>();
    m.phi = j.at("phi").get<double>();
    m.sites = j.at("sites").get<std::size_t>();
    m.bosons = j.at("bosons").get<int>();
    m.basis = j.at("basis").get<std::string>();
    m.order = j.at("phase_order").get<std::string>();
    return m;
  }
};

HamiltonianMatrix build(const ModelOptions& m) {
  const BasisDescriptor basis = make_basis(m.sites, m.bosons, parse_basis_kind(m.basis));
  return build_hamiltonian(m.params(), basis, parse_phase_orientation(m.order));
}

std::string fixed5(double v) {
  if (std::abs(v) < 5e-6) v = 0.0;  // no "-0.00000"
  std::ostringstream os;
  os << std::fixed << std::setprecision(5) << v;
  return os.str();
}

std::string full(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
  if (!f) throw Error("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

std::string summary(std::string_view command, const json& config, const json& results) {
  json j;
  j["command"] = command;
  j["config"] = config;
  j["version"] = version();
  j["results"] = results;
  return j.dump(2) + "\n";
}

json common_json(const Common& c) { return json{{"seed", c.seed}, {"threads", c.threads}}; }

void add_model_options(CLI::App* app, ModelOptions& m, bool with_basis) {
  app->add_option("--t", m.t, "Hopping amplitude")->capture_default_str();
  app->add_option("--U", m.u, "On-site interaction")->capture_default_str();
  app->add_option("--phi", m.phi, "Hopping phase of the deformed model")->capture_default_str();
  app->add_option("--sites", m.sites, "Ring length M")->capture_default_str();
  app->add_option("--bosons", m.bosons, "Boson number N")->capture_default_str();
  if (with_basis) {
    app->add_option("--basis", m.basis, "Basis: full, translation, reduced")
        ->check(CLI::IsMember({"full", "translation", "reduced"}))
        ->capture_default_str();
  }
  app->add_option("--phase-order", m.order, "Phase orientation: lex, revlex, interaction")
      ->check(CLI::IsMember({"lex", "revlex", "interaction"}))
      ->capture_default_str();
}

// ---------------------------------------------------------------------------
// Checks

struct CheckLog {
  std::ostream& out;
  bool ok = true;
  json items = json::array();

  void report(const std::string& name, bool pass, double value, double tol) {
    out << "check " << name << ": " << (pass ? "PASS" : "FAIL") << " (" << full(value)
        << " vs tol " << full(tol) << ")\n";
    items.push_back(json{{"name", name}, {"pass", pass}, {"value", value}, {"tolerance", tol}});
    ok = ok && pass;
  }
};

double gradient_check(Ansatz& a, const HamiltonianMatrix& h) {
  const FeatureTable features = feature_table(h.basis);
  const EnergyGradient eg = rayleigh_gradient(a.coefficients(features), h);
  const std::vector<double> analytic = a.pullback(features, eg.g);
  std::vector<double> theta = a.parameters();
  const double step = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    theta[i] = keep + step;
    a.set_parameters(theta);
    const double up = rayleigh_energy(a.coefficients(features), h);
    theta[i] = keep - step;
    a.set_parameters(theta);
    const double down = rayleigh_energy(a.coefficients(features), h);
    theta[i] = keep;
    const double numeric = (up - down) / (2 * step);
    worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(std::abs(numeric), 1e-3));
  }
  a.set_parameters(theta);
  return worst;
}

// ---------------------------------------------------------------------------
// Checkpoints

struct Checkpoint {
  ModelOptions model;
  std::unique_ptr<Ansatz> ansatz;
};

std::string checkpoint_json(const ModelOptions& m, const Ansatz& a, const json& train) {
  json j;
  j["format"] = "bosehub.checkpoint";
  j["version"] = 1;
  j["model"] = m.to_json();
  j["train"] = train;
  j["ansatz"] = json::parse(a.to_json());
  return j.dump(2) + "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string text = read_file(path);
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "bosehub.checkpoint") throw DomainError(path + ": not a checkpoint");
    if (j.value("version", 0) != 1) throw DomainError(path + ": unsupported checkpoint version");
    Checkpoint c;
    c.model = ModelOptions::from_json(j.at("model"));
    c.ansatz = ansatz_from_json(j.at("ansatz").dump());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(path + ": malformed checkpoint: " + e.what());
  }
}

// Circuit P(0) per class; only real circuits with probability readout have
// weights a device can sample.
std::vector<double> sampled_weights(const Checkpoint& c, const HamiltonianMatrix& h) {
  const auto* circuit = dynamic_cast<const CircuitAnsatz*>(c.ansatz.get());
  if (circuit == nullptr || circuit->complex_mode() || circuit->readout() != Readout::Probability) {
    throw ConfigurationError("sampling studies need a real circuit checkpoint with probability readout");
  }
  const CVector coeffs = circuit->coefficients(feature_table(h.basis));
  std::vector<double> w(coeffs.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = coeffs[i].real();
  return w;
}

// ---------------------------------------------------------------------------
// exact

struct ExactOptions {
  ModelOptions model;
};

int cmd_exact(const Common& common, ExactOptions opt, std::ostream& out) {
  const HamiltonianMatrix h = build(opt.model);
  const GroundState gs = ground_state(h);
  out << "E0 = " << fixed5(gs.energy) << "\n";

  json results{{"energy", gs.energy},
               {"dimension", h.dim()},
               {"iterations", gs.sweeps},
               {"residual", gs.residual}};
  if (opt.model.phi != 0.0) {
    json study = json::array();
    for (const auto& [o, e] : phase_convention_study(opt.model.params())) {
      study.push_back(json{{"phase_order", to_string(o)}, {"energy", e}});
      out << "  phase order " << to_string(o) << ": " << fixed5(e) << "\n";
    }
    results["convention_study"] = study;
  }

  CheckLog log{out};
  if (common.check) {
    log.report("hermiticity", h.entries.hermiticity_defect() <= 1e-12,
               h.entries.hermiticity_defect(), 1e-12);
    const ExtremalPair inv = lowest_eigenpair_inverse_iteration(h.entries);
    log.report("inverse_iteration", std::abs(inv.value - gs.energy) <= 1e-9,
               std::abs(inv.value - gs.energy), 1e-9);
    if (opt.model.phi == 0.0) {
      for (const char* kind : {"full", "translation", "reduced"}) {
        if (kind == opt.model.basis) continue;
        ModelOptions other = opt.model;
        other.basis = kind;
        const double e = ground_state(build(other)).energy;
        log.report(std::string("basis_") + kind, std::abs(e - gs.energy) <= 1e-9,
                   std::abs(e - gs.energy), 1e-9);
      }
    }
    results["checks"] = log.items;
  }

  const fs::path dir = common.out_dir;
  write_file(dir / "exact_ground_state.csv", render([&](std::ostream& os) { write_ground_state_csv(os, gs); }));
  write_file(dir / "exact_matrix.coo", render([&](std::ostream& os) { write_matrix_coo(os, h); }));
  json config = common_json(common);
  config["model"] = opt.model.to_json();
  write_file(dir / "exact_summary.json", summary("exact", config, results));
  return log.ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  ModelOptions model;
  std::string ansatz = "nn";
  std::size_t layers = 6;
  std::vector<std::size_t> hidden{64, 32};
  int steps = -1;  // 1500 for the network, 1200 for circuits
  double lr = 0.02;
  int restarts = 1;
  bool complex_mode = false;
  std::string readout = "probability";
  double init_scale = 0.1;
};

AnsatzSpec ansatz_spec(const TrainOptions& opt) {
  AnsatzSpec spec;
  spec.kind = parse_ansatz_kind(opt.ansatz);
  spec.sites = opt.model.sites;
  spec.layers = opt.layers;
  spec.hidden = opt.hidden;
  spec.complex_mode = opt.complex_mode || opt.model.phi != 0.0;
  spec.readout = opt.readout == "signed_z" ? Readout::SignedZ : Readout::Probability;
  spec.circuit_init_scale = opt.init_scale;
  return spec;
}

json train_config_json(const Common& common, const TrainOptions& opt, const AnsatzSpec& spec,
                       const TrainConfig& cfg) {
  json config = common_json(common);
  config["model"] = opt.model.to_json();
  config["ansatz"] = opt.ansatz;
  config["complex"] = spec.complex_mode;
  if (spec.kind == AnsatzKind::Mlp) {
    config["hidden"] = opt.hidden;
  } else {
    config["layers"] = opt.layers;
    config["readout"] = opt.readout;
    config["init_scale"] = opt.init_scale;
  }
  config["steps"] = cfg.steps;
  config["learning_rate"] = cfg.learning_rate;
  config["restarts"] = cfg.restarts;
  return config;
}

int cmd_train(const Common& common, TrainOptions opt, std::ostream& out, std::ostream& err) {
  const AnsatzSpec spec = ansatz_spec(opt);
  TrainConfig cfg;
  cfg.steps = opt.steps >= 0 ? opt.steps : (spec.kind == AnsatzKind::Mlp ? 1500 : 1200);
  cfg.learning_rate = opt.lr;
  cfg.seed = common.seed;
  cfg.restarts = opt.restarts;
  cfg.validate();

  const HamiltonianMatrix h = build(opt.model);
  const double exact = ground_state(h).energy;
  const fs::path dir = common.out_dir;
  const json config = train_config_json(common, opt, spec, cfg);

  CheckLog log{out};
  json results;
  if (common.check) {
    auto probe = make_ansatz(spec, cfg.seed);
    const double worst = gradient_check(*probe, h);
    log.report("gradient", worst <= 1e-6, worst, 1e-6);
  }

  RestartResult best;
  try {
    best = train_best_of([&](std::uint64_t seed) { return make_ansatz(spec, seed); }, h, cfg,
                         common.threads);
  } catch (const DivergenceError& e) {
    TrainResult partial;
    partial.trace = e.trace();
    partial.exact_energy = exact;
    write_file(dir / "train_trace.csv", render([&](std::ostream& os) { write_trace_csv(os, partial); }));
    err << "error: " << e.what() << " after " << e.trace().size() << " steps\n";
    return kDivergence;
  }

  const TrainResult& r = best.best;
  out << "E = " << fixed5(r.final_energy) << "  exact = " << fixed5(exact)
      << "  diff = " << fixed5(r.final_energy - exact) << "\n";

  results["final_energy"] = r.final_energy;
  results["exact_energy"] = exact;
  results["difference"] = r.final_energy - exact;
  results["best_seed"] = r.seed;
  results["num_params"] = best.ansatz->num_params();
  results["restart_energies"] = best.finals;
  if (common.check) results["checks"] = log.items;

  const json train_meta{{"seed", r.seed},
                        {"steps", cfg.steps},
                        {"learning_rate", cfg.learning_rate},
                        {"restarts", cfg.restarts},
                        {"final_energy", r.final_energy},
                        {"exact_energy", exact}};
  write_file(dir / "train_checkpoint.json", checkpoint_json(opt.model, *best.ansatz, train_meta));
  write_file(dir / "train_trace.csv", render([&](std::ostream& os) { write_trace_csv(os, r); }));
  write_file(dir / "train_summary.json", summary("train", config, results));
  return log.ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// study

struct LayersOptions {
  ModelOptions model;
  std::string ansatz = "compressed";
  std::vector<std::size_t> layers{3, 4, 5, 6};
  int steps = 1200;
  double lr = 0.02;
  int restarts = 1;
};

int cmd_study_layers(const Common& common, LayersOptions opt, std::ostream& out) {
  const HamiltonianMatrix h = build(opt.model);
  TrainConfig cfg;
  cfg.steps = opt.steps;
  cfg.learning_rate = opt.lr;
  cfg.seed = common.seed;
  cfg.restarts = opt.restarts;
  const auto rows = layer_study(parse_ansatz_kind(opt.ansatz), opt.layers, h, cfg, common.threads);

  out << "layers  energy\n";
  json table = json::array();
  std::ostringstream csv;
  csv << "layers,energy\n";
  for (const auto& row : rows) {
    out << std::setw(6) << row.layers << "  " << fixed5(row.energy) << "\n";
    csv << row.layers << ',' << full(row.energy) << '\n';
    table.push_back(json{{"layers", row.layers}, {"energy", row.energy}});
  }
  const double exact = rows.empty() ? ground_state(h).energy : rows.front().exact;
  out << " exact  " << fixed5(exact) << "\n";

  json config = common_json(common);
  config["model"] = opt.model.to_json();
  config["ansatz"] = opt.ansatz;
  config["layers"] = opt.layers;
  config["steps"] = opt.steps;
  config["learning_rate"] = opt.lr;
  config["restarts"] = opt.restarts;
  const fs::path dir = common.out_dir;
  write_file(dir / "study_layers.csv", csv.str());
  write_file(dir / "study_layers_summary.json",
             summary("study layers", config, json{{"exact_energy", exact}, {"rows", table}}));
  return kOk;
}

struct ShotsOptions {
  std::string checkpoint;
  std::vector<std::int64_t> grid{100, 1000, 10000, 20000, 100000};
  int trials = 100;
};

int cmd_study_shots(const Common& common, ShotsOptions opt, std::ostream& out) {
  const Checkpoint c = load_checkpoint(opt.checkpoint);
  const HamiltonianMatrix h = build(c.model);
  const std::vector<double> w = sampled_weights(c, h);
  const auto rows = shot_study(w, h, opt.grid, opt.trials, common.seed, common.threads);

  out << "   shots  median_dE/E        std\n";
  std::ostringstream csv;
  csv << "shots,median_frac_dev,std\n";
  json table = json::array();
  for (const auto& row : rows) {
    out << std::setw(8) << row.shots << "  " << std::scientific << std::setprecision(5)
        << row.median_frac_dev << "  " << row.std << std::defaultfloat << "\n";
    csv << row.shots << ',' << full(row.median_frac_dev) << ',' << full(row.std) << '\n';
    table.push_back(json{{"shots", row.shots}, {"median_frac_dev", row.median_frac_dev}, {"std", row.std}});
  }
  json config = common_json(common);
  config["checkpoint"] = opt.checkpoint;
  config["model"] = c.model.to_json();
  config["grid"] = opt.grid;
  config["trials"] = opt.trials;
  const fs::path dir = common.out_dir;
  write_file(dir / "study_shots.csv", csv.str());
  write_file(dir / "study_shots_summary.json",
             summary("study shots", config,
                     json{{"ideal_energy", rayleigh_energy(CVector(w.begin(), w.end()), h)},
                          {"rows", table}}));
  return kOk;
}

struct NoiseOptions {
  std::vector<std::string> checkpoints;
  std::vector<double> u_values;
  std::vector<std::string> modes{"uncorrected", "corrected", "postselected",
                                 "postselected_corrected"};
  int trials = 100;
  std::int64_t shots = 20000;
  std::int64_t calibration_shots = 20000;
  double min_rate = 0.005;
  double max_rate = 0.05;
  std::size_t replicas = 5;
};

constexpr NoiseMode kAllModes[] = {NoiseMode::Uncorrected, NoiseMode::Corrected,
                                   NoiseMode::Postselected, NoiseMode::PostselectedCorrected};

QubitLayout layout_for(const HamiltonianMatrix& h, std::size_t replicas) {
  QubitLayout l;
  l.classes = h.dim();
  l.anchor = h.dim() - 1;
  l.replicas = replicas;
  return l;
}

SimulatedDevice device_for(const NoiseOptions& opt, const QubitLayout& layout,
                           std::uint64_t seed, std::uint64_t trial) {
  return SimulatedDevice::synthetic(layout.qubits(), opt.min_rate, opt.max_rate,
                                    derive_seed(seed, 0xde01ce, trial));
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

int cmd_study_noise(const Common& common, NoiseOptions opt, std::ostream& out) {
  if (opt.checkpoints.empty()) throw ConfigurationError("study noise needs --checkpoint");
  if (!opt.u_values.empty() && opt.u_values.size() != opt.checkpoints.size()) {
    throw ConfigurationError("--U lists " + std::to_string(opt.u_values.size()) + " values for " +
                             std::to_string(opt.checkpoints.size()) + " checkpoints");
  }
  if (opt.trials < 1) throw DomainError("trials must be at least 1");
  std::vector<NoiseMode> modes;
  for (const auto& m : opt.modes) modes.push_back(parse_noise_mode(m));

  std::ostringstream csv;
  csv << "run,mode,U,energy,ideal_energy\n";
  json per_u = json::array();
  for (std::size_t ci = 0; ci < opt.checkpoints.size(); ++ci) {
    const Checkpoint c = load_checkpoint(opt.checkpoints[ci]);
    if (!opt.u_values.empty() && opt.u_values[ci] != c.model.u) {
      throw ConfigurationError(opt.checkpoints[ci] + " was trained at U=" + full(c.model.u) +
                               ", not U=" + full(opt.u_values[ci]));
    }
    const HamiltonianMatrix h = build(c.model);
    const std::vector<double> w = sampled_weights(c, h);
    const QubitLayout layout = layout_for(h, opt.replicas);

    const auto n = static_cast<std::size_t>(opt.trials);
    std::vector<std::array<double, 4>> energies(n);
    std::vector<double> ideal(n);
    parallel_for(n, common.threads, [&](std::size_t t) {
      NoisyRunConfig cfg;
      cfg.shots = opt.shots;
      cfg.calibration_shots = opt.calibration_shots;
      cfg.seed = derive_seed(common.seed, 0x7275, t);
      const NoisyRun run = noisy_run(w, h, device_for(opt, layout, common.seed, t), layout, cfg);
      for (std::size_t m = 0; m < 4; ++m) energies[t][m] = mean(noisy_energies(run, h, layout, kAllModes[m]));
      ideal[t] = run.ideal_energy;
    });

    int corrected_better = 0, postselected_smaller = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const auto& e = energies[t];
      corrected_better += std::abs(e[1] - ideal[t]) < std::abs(e[0] - ideal[t]);
      postselected_smaller += std::abs(e[3] - e[2]) < std::abs(e[1] - e[0]);
      for (NoiseMode m : modes) {
        csv << t << ',' << to_string(m) << ',' << full(c.model.u) << ','
            << full(e[static_cast<std::size_t>(m)]) << ',' << full(ideal[t]) << '\n';
      }
    }
    out << "U = " << fixed5(c.model.u) << "  ideal = " << fixed5(ideal.front()) << "\n";
    for (NoiseMode m : modes) {
      std::vector<double> col(n);
      for (std::size_t t = 0; t < n; ++t) col[t] = energies[t][static_cast<std::size_t>(m)];
      out << "  " << std::left << std::setw(24) << to_string(m) << std::right << fixed5(mean(col)) << "\n";
    }
    out << "  corrected closer than uncorrected: " << corrected_better << "/" << n << "\n";
    out << "  postselected correction smaller:   " << postselected_smaller << "/" << n << "\n";
    per_u.push_back(json{{"U", c.model.u},
                         {"checkpoint", opt.checkpoints[ci]},
                         {"ideal_energy", ideal.front()},
                         {"corrected_better", corrected_better},
                         {"postselected_correction_smaller", postselected_smaller},
                         {"trials", n}});
  }

  json config = common_json(common);
  config["checkpoints"] = opt.checkpoints;
  config["modes"] = opt.modes;
  config["trials"] = opt.trials;
  config["shots"] = opt.shots;
  config["calibration_shots"] = opt.calibration_shots;
  config["flip_rate_range"] = {opt.min_rate, opt.max_rate};
  config["replicas"] = opt.replicas;
  const fs::path dir = common.out_dir;
  write_file(dir / "study_noise.csv", csv.str());
  write_file(dir / "study_noise_summary.json", summary("study noise", config, json{{"per_U", per_u}}));
  return kOk;
}

// ---------------------------------------------------------------------------
// noise-run

struct NoiseRunOptions {
  std::string checkpoint;
  std::int64_t shots = 20000;
  std::int64_t calibration_shots = 20000;
  double min_rate = 0.005;
  double max_rate = 0.05;
  std::size_t replicas = 5;
};

int cmd_noise_run(const Common& common, NoiseRunOptions opt, std::ostream& out) {
  const Checkpoint c = load_checkpoint(opt.checkpoint);
  const HamiltonianMatrix h = build(c.model);
  const std::vector<double> w = sampled_weights(c, h);
  const QubitLayout layout = layout_for(h, opt.replicas);
  const SimulatedDevice device = SimulatedDevice::synthetic(
      layout.qubits(), opt.min_rate, opt.max_rate, derive_seed(common.seed, 0xde01ce, 0));
  NoisyRunConfig cfg;
  cfg.shots = opt.shots;
  cfg.calibration_shots = opt.calibration_shots;
  cfg.seed = derive_seed(common.seed, 0x7275, 0);
  const NoisyRun run = noisy_run(w, h, device, layout, cfg);

  out << "ideal " << std::setw(18) << "" << fixed5(run.ideal_energy) << "\n";
  std::ostringstream csv;
  csv << "run,mode,U,energy,ideal_energy\n";
  json results{{"ideal_energy", run.ideal_energy}};
  json modes = json::object();
  for (NoiseMode m : kAllModes) {
    const auto e = noisy_energies(run, h, layout, m);
    out << std::left << std::setw(24) << to_string(m) << std::right << fixed5(mean(e)) << "\n";
    csv << 0 << ',' << to_string(m) << ',' << full(c.model.u) << ',' << full(mean(e)) << ','
        << full(run.ideal_energy) << '\n';
    modes[std::string(to_string(m))] = e;
  }
  results["energies"] = modes;
  json selected = json::array();
  for (std::size_t q : run.selected) selected.push_back(q);
  results["selected_qubits"] = selected;

  json config = common_json(common);
  config["checkpoint"] = opt.checkpoint;
  config["shots"] = opt.shots;
  config["calibration_shots"] = opt.calibration_shots;
  config["flip_rate_range"] = {opt.min_rate, opt.max_rate};
  config["replicas"] = opt.replicas;
  const fs::path dir = common.out_dir;
  write_file(dir / "noise_calibration.csv", render([&](std::ostream& os) { write_calibration_csv(os, run); }));
  write_file(dir / "noise_energies.csv", csv.str());
  write_file(dir / "noise_summary.json", summary("noise-run", config, results));
  return kOk;
}

// ---------------------------------------------------------------------------
// basis

struct BasisOptions {
  std::size_t sites = 6;
  int bosons = 5;
  std::string kind = "reduced";
};

int cmd_basis(const Common& common, BasisOptions opt, std::ostream& out) {
  json counts;
  for (const char* k : {"full", "translation", "reduced"}) {
    const std::size_t n = make_basis(opt.sites, opt.bosons, parse_basis_kind(k)).size();
    out << std::left << std::setw(12) << k << std::right << n << "\n";
    counts[k] = n;
  }
  const BasisDescriptor b = make_basis(opt.sites, opt.bosons, parse_basis_kind(opt.kind));
  json config = common_json(common);
  config["sites"] = opt.sites;
  config["bosons"] = opt.bosons;
  config["kind"] = opt.kind;
  const fs::path dir = common.out_dir;
  write_file(dir / "basis.csv", render([&](std::ostream& os) { write_basis_csv(os, b); }));
  write_file(dir / "basis_summary.json", summary("basis", config, json{{"counts", counts}}));
  return kOk;
}

std::uint64_t seed_from_env() {
  const char* env = std::getenv("BOSEHUB_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string_view(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw ConfigurationError(std::string("BOSEHUB_SEED is not an unsigned integer: ") + env);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Common common;
  try {
    common.seed = seed_from_env();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  common.threads = std::max(1u, std::thread::hardware_concurrency());

  CLI::App app{"Bose-Hubbard ring: exact diagonalization, variational ansatze and readout studies",
               "bosehub"};
  app.set_version_flag("--version", version());
  app.set_config("--config", "", "TOML configuration file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", common.seed, "Random seed (default: $BOSEHUB_SEED or 1234)");
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", common.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--check", common.check, "Run oracle comparisons and report PASS/FAIL");

  ExactOptions exact;
  exact.model.basis = "full";
  auto* exact_cmd = app.add_subcommand("exact", "Exact ground state");
  add_model_options(exact_cmd, exact.model, true);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Variational training");
  add_model_options(train_cmd, train.model, true);
  train_cmd->add_option("--ansatz", train.ansatz, "nn, compressed or quat")
      ->check(CLI::IsMember({"nn", "compressed", "quat"}))
      ->required();
  train_cmd->add_option("--layers", train.layers, "Circuit layers")->capture_default_str();
  train_cmd->add_option("--hidden", train.hidden, "Hidden layer widths")->delimiter(',');
  train_cmd->add_option("--steps", train.steps, "Adam steps (default 1500 network, 1200 circuit)");
  train_cmd->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--restarts", train.restarts, "Independent initializations, best kept")
      ->capture_default_str();
  train_cmd->add_flag("--complex", train.complex_mode, "Complex coefficients (implied by --phi)");
  train_cmd->add_option("--readout", train.readout, "Circuit readout: probability, signed_z")
      ->check(CLI::IsMember({"probability", "signed_z"}))
      ->capture_default_str();
  train_cmd->add_option("--init-scale", train.init_scale, "Circuit init half-width")
      ->capture_default_str();

  auto* study_cmd = app.add_subcommand("study", "Parameter studies");
  study_cmd->require_subcommand(1);

  LayersOptions layers;
  auto* layers_cmd = study_cmd->add_subcommand("layers", "Final energy versus circuit depth");
  add_model_options(layers_cmd, layers.model, false);
  layers_cmd->add_option("--ansatz", layers.ansatz, "compressed or quat")
      ->check(CLI::IsMember({"compressed", "quat"}))
      ->capture_default_str();
  layers_cmd->add_option("--layers", layers.layers, "Depths")->delimiter(',');
  layers_cmd->add_option("--steps", layers.steps, "Adam steps")->capture_default_str();
  layers_cmd->add_option("--lr", layers.lr, "Learning rate")->capture_default_str();
  layers_cmd->add_option("--restarts", layers.restarts, "Restarts per depth")->capture_default_str();

  ShotsOptions shots;
  auto* shots_cmd = study_cmd->add_subcommand("shots", "Finite-shot energy deviation");
  shots_cmd->add_option("--checkpoint", shots.checkpoint, "Trained circuit checkpoint")->required();
  shots_cmd->add_option("--grid", shots.grid, "Shot counts")->delimiter(',');
  shots_cmd->add_option("--trials", shots.trials, "Trials per shot count")->capture_default_str();

  NoiseOptions noise;
  auto* noise_cmd = study_cmd->add_subcommand("noise", "Readout mitigation on a simulated device");
  noise_cmd->add_option("--checkpoint", noise.checkpoints, "Trained circuit checkpoints")
      ->delimiter(',')
      ->required();
  noise_cmd->add_option("--U", noise.u_values, "Expected U of each checkpoint")->delimiter(',');
  noise_cmd->add_option("--modes", noise.modes, "Modes to report")->delimiter(',');
  noise_cmd->add_option("--trials", noise.trials, "Seeded device/run trials")->capture_default_str();
  noise_cmd->add_option("--shots", noise.shots, "Shots per qubit")->capture_default_str();
  noise_cmd->add_option("--calibration-shots", noise.calibration_shots, "Shots per calibration state")
      ->capture_default_str();
  noise_cmd->add_option("--min-rate", noise.min_rate, "Lowest flip rate")->capture_default_str();
  noise_cmd->add_option("--max-rate", noise.max_rate, "Highest flip rate")->capture_default_str();
  noise_cmd->add_option("--replicas", noise.replicas, "Qubit replicas per coefficient")
      ->capture_default_str();

  NoiseRunOptions noise_run;
  auto* noise_run_cmd = app.add_subcommand("noise-run", "One calibrated run on a simulated device");
  noise_run_cmd->add_option("--checkpoint", noise_run.checkpoint, "Trained circuit checkpoint")
      ->required();
  noise_run_cmd->add_option("--shots", noise_run.shots, "Shots per qubit")->capture_default_str();
  noise_run_cmd->add_option("--calibration-shots", noise_run.calibration_shots,
                            "Shots per calibration state")
      ->capture_default_str();
  noise_run_cmd->add_option("--min-rate", noise_run.min_rate, "Lowest flip rate")->capture_default_str();
  noise_run_cmd->add_option("--max-rate", noise_run.max_rate, "Highest flip rate")->capture_default_str();
  noise_run_cmd->add_option("--replicas", noise_run.replicas, "Qubit replicas per coefficient")
      ->capture_default_str();

  BasisOptions basis;
  auto* basis_cmd = app.add_subcommand("basis", "Basis sizes and class table");
  basis_cmd->add_option("--sites", basis.sites, "Ring length M")->capture_default_str();
  basis_cmd->add_option("--bosons", basis.bosons, "Boson number N")->capture_default_str();
  basis_cmd->add_option("--kind", basis.kind, "full, translation or reduced")
      ->check(CLI::IsMember({"full", "translation", "reduced"}))
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*exact_cmd) return cmd_exact(common, exact, out);
    if (*train_cmd) return cmd_train(common, train, out, err);
    if (*layers_cmd) return cmd_study_layers(common, layers, out);
    if (*shots_cmd) return cmd_study_shots(common, shots, out);
    if (*noise_cmd) return cmd_study_noise(common, noise, out);
    if (*noise_run_cmd) return cmd_noise_run(common, noise_run, out);
    if (*basis_cmd) return cmd_basis(common, basis, out);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (iterations " << e.iterations() << ", residual "
        << e.residual() << ")\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace bosehub::cli
