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

#include "bosehub/variational.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "bosehub/errors.hpp"

namespace bosehub {

FeatureTable feature_table(const BasisDescriptor& basis, bool centred) {
  FeatureTable table;
  table.reserve(basis.size());
  for (const auto& c : basis.classes)
    table.push_back(centred ? features(c.representative) : raw_features(c.representative));
  return table;
}

std::string_view to_string(AnsatzKind kind) {
  switch (kind) {
    case AnsatzKind::Mlp:
      return "nn";
    case AnsatzKind::CircuitCompressed:
      return "compressed";
    case AnsatzKind::CircuitQuat:
      return "quat";
  }
  return "unknown";
}

AnsatzKind parse_ansatz_kind(std::string_view name) {
  if (name == "nn" || name == "mlp") return AnsatzKind::Mlp;
  if (name == "compressed") return AnsatzKind::CircuitCompressed;
  if (name == "quat") return AnsatzKind::CircuitQuat;
  throw DomainError("unknown ansatz: " + std::string(name));
}

CVector Ansatz::coefficients(const FeatureTable& features) const {
  CVector out;
  out.reserve(features.size());
  for (const auto& x : features) out.push_back(coefficient(x));
  return out;
}

// ---------------------------------------------------------------------------
// Network

MlpAnsatz::MlpAnsatz(MlpParams params) : params_(std::move(params)) {
  if (params_.outputs() != 1 && params_.outputs() != 2) {
    throw DimensionError("network ansatz needs 1 or 2 outputs");
  }
}

cplx MlpAnsatz::coefficient(std::span<const double> features) const {
  const auto out = mlp_forward(params_, features);
  return bosehub::coefficient(out);
}

std::vector<double> MlpAnsatz::pullback(const FeatureTable& features,
                                        std::span<const cplx> g) const {
  std::vector<double> total(num_params(), 0.0);
  std::vector<double> upstream(params_.outputs());
  for (std::size_t c = 0; c < features.size(); ++c) {
    const auto out = mlp_forward(params_, features[c]);
    const cplx coeff = bosehub::coefficient(out);
    const cplx w = std::conj(g[c]) * coeff;
    // dc/dx0 = c (zero once clamped), dc/dx1 = i c.
    upstream[0] = std::abs(out[0]) > kMaxExponent ? 0.0 : w.real();
    if (upstream.size() == 2) upstream[1] = -w.imag();
    const auto grad = mlp_gradient(params_, features[c], upstream);
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += grad[k];
  }
  return total;
}

std::string MlpAnsatz::to_json() const {
  nlohmann::json j;
  j["format"] = "bosehub.ansatz";
  j["version"] = 1;
  j["ansatz"] = "nn";
  j["complex"] = complex_mode();
  j["model"] = nlohmann::json::parse(mlp_params_to_json(params_));
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Circuits

CircuitAnsatz::CircuitAnsatz(CircuitParams params, bool complex_mode, Readout readout)
    : params_(std::move(params)), complex_(complex_mode), readout_(readout) {
  if (complex_ && readout_ != Readout::Probability) {
    throw DomainError("complex circuit readout uses (1 + <Z>)/2 for the magnitude");
  }
}

AnsatzKind CircuitAnsatz::kind() const {
  return params_.kind == CircuitKind::Compressed ? AnsatzKind::CircuitCompressed
                                                 : AnsatzKind::CircuitQuat;
}

cplx CircuitAnsatz::coefficient(std::span<const double> features) const {
  if (complex_) return complex_weight_of(params_, features);
  return weight_of(params_, features, readout_);
}

std::vector<double> CircuitAnsatz::pullback(const FeatureTable& features,
                                            std::span<const cplx> g) const {
  std::vector<double> total(num_params(), 0.0);
  for (std::size_t c = 0; c < features.size(); ++c) {
    const ObservableGradients og = observable_gradients(params_, features[c]);
    if (!complex_) {
      const double scale = readout_ == Readout::Probability ? 0.5 : 1.0;
      const double gr = g[c].real() * scale;
      for (std::size_t k = 0; k < total.size(); ++k) total[k] += gr * og.dz[k];
      continue;
    }
    // c = m e^{i pi x}, m = (1 + z)/2:  dc = e^{i pi x} (dz/2 + i pi m dx).
    const double m = 0.5 * (1.0 + og.z);
    const cplx w = std::conj(g[c]) * std::polar(1.0, std::numbers::pi * og.x);
    for (std::size_t k = 0; k < total.size(); ++k) {
      const cplx dc{0.5 * og.dz[k], std::numbers::pi * m * og.dx[k]};
      total[k] += (w * dc).real();
    }
  }
  return total;
}

std::string CircuitAnsatz::to_json() const {
  nlohmann::json j;
  j["format"] = "bosehub.ansatz";
  j["version"] = 1;
  j["ansatz"] = std::string(to_string(kind()));
  j["complex"] = complex_;
  j["readout"] = readout_ == Readout::Probability ? "probability" : "signed_z";
  j["model"] = nlohmann::json::parse(circuit_params_to_json(params_));
  return j.dump(2) + "\n";
}

std::unique_ptr<Ansatz> make_ansatz(const AnsatzSpec& spec, std::uint64_t seed) {
  if (spec.kind == AnsatzKind::Mlp) {
    std::vector<std::size_t> sizes{spec.sites};
    sizes.insert(sizes.end(), spec.hidden.begin(), spec.hidden.end());
    sizes.push_back(spec.complex_mode ? 2 : 1);
    return std::make_unique<MlpAnsatz>(MlpParams::random(std::move(sizes), seed));
  }
  const CircuitKind ck =
      spec.kind == AnsatzKind::CircuitCompressed ? CircuitKind::Compressed : CircuitKind::Quat;
  if (ck == CircuitKind::Compressed && spec.sites % 3 != 0) {
    throw ConfigurationError("compressed scheme needs the site count to be a multiple of 3");
  }
  return std::make_unique<CircuitAnsatz>(
      CircuitParams::random(ck, spec.layers, spec.sites, seed, spec.circuit_init_scale),
      spec.complex_mode, spec.readout);
}

std::unique_ptr<Ansatz> ansatz_from_json(std::string_view text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw DomainError("checkpoint is not a JSON object");
    if (j.value("format", "") != "bosehub.ansatz") throw DomainError("not an ansatz checkpoint");
    if (j.value("version", 0) != 1) throw DomainError("unsupported ansatz checkpoint version");
    const AnsatzKind kind = parse_ansatz_kind(j.at("ansatz").get<std::string>());
    const std::string model = j.at("model").dump();
    if (kind == AnsatzKind::Mlp) return std::make_unique<MlpAnsatz>(mlp_params_from_json(model));
    const Readout readout =
        j.value("readout", "probability") == "signed_z" ? Readout::SignedZ : Readout::Probability;
    return std::make_unique<CircuitAnsatz>(circuit_params_from_json(model),
                                           j.at("complex").get<bool>(), readout);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed checkpoint: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Energy

EnergyGradient rayleigh_gradient(std::span<const cplx> coeffs, const HamiltonianMatrix& h) {
  if (coeffs.size() != h.dim()) {
    throw DimensionError("coefficient vector has " + std::to_string(coeffs.size()) +
                         " entries for a " + std::to_string(h.dim()) + "-dimensional basis");
  }
  const double nrm = dot(coeffs, coeffs).real();
  if (nrm == 0.0) throw DomainError("zero coefficient vector has no energy");
  const CVector hc = h.entries.apply(coeffs);
  EnergyGradient out;
  out.energy = dot(coeffs, hc).real() / nrm;
  out.g.resize(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    out.g[i] = 2.0 * (hc[i] - out.energy * coeffs[i]) / nrm;
  return out;
}

double rayleigh_energy(std::span<const cplx> coeffs, const HamiltonianMatrix& h) {
  if (coeffs.size() != h.dim()) throw DimensionError("coefficient vector size != basis size");
  const double nrm = dot(coeffs, coeffs).real();
  if (nrm == 0.0) throw DomainError("zero coefficient vector has no energy");
  return dot(coeffs, h.entries.apply(coeffs)).real() / nrm;
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
  if (steps < 0) throw DomainError("steps must be non-negative");
  if (!(learning_rate > 0.0)) throw DomainError("learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) {
    throw DomainError("Adam betas must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) throw DomainError("Adam epsilon must be positive");
  if (restarts < 1) throw DomainError("restarts must be at least 1");
}

Adam::Adam(std::size_t n, const TrainConfig& cfg)
    : lr_(cfg.learning_rate),
      beta1_(cfg.beta1),
      beta2_(cfg.beta2),
      eps_(cfg.epsilon),
      m_(n, 0.0),
      v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

TrainResult train(Ansatz& ansatz, const HamiltonianMatrix& h, const TrainConfig& cfg,
                  std::optional<double> exact_energy) {
  cfg.validate();
  if (!h.is_real && !ansatz.complex_mode()) {
    throw DomainError("a complex Hamiltonian needs a complex-mode ansatz");
  }
  const FeatureTable features = feature_table(h.basis, cfg.centred_features);
  TrainResult result;
  result.seed = cfg.seed;
  result.exact_energy = exact_energy ? *exact_energy : ground_state(h).energy;
  const double floor = result.exact_energy - 1e-9;

  std::vector<double> params = ansatz.parameters();
  Adam adam(params.size(), cfg);
  result.trace.reserve(static_cast<std::size_t>(cfg.steps));
  auto check = [&](double e) {
    if (!std::isfinite(e)) throw DivergenceError("energy became non-finite", result.trace);
    if (e < floor) {
      throw Error("variational bound violated: " + std::to_string(e) + " < exact " +
                  std::to_string(result.exact_energy));
    }
  };
  for (int step = 0; step < cfg.steps; ++step) {
    const CVector c = ansatz.coefficients(features);
    const EnergyGradient eg = rayleigh_gradient(c, h);
    result.trace.push_back(eg.energy);
    check(eg.energy);
    const auto grad = ansatz.pullback(features, eg.g);
    adam.step(params, grad);
    ansatz.set_parameters(params);
  }
  result.final_energy = rayleigh_energy(ansatz.coefficients(features), h);
  check(result.final_energy);
  result.params = std::move(params);
  return result;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RestartResult train_best_of(const AnsatzFactory& factory, const HamiltonianMatrix& h,
                            const TrainConfig& cfg, unsigned threads) {
  cfg.validate();
  const double exact = ground_state(h).energy;
  const auto runs = static_cast<std::size_t>(cfg.restarts);
  std::vector<TrainResult> results(runs);
  std::vector<std::unique_ptr<Ansatz>> ansatze(runs);
  parallel_for(runs, threads, [&](std::size_t r) {
    TrainConfig one = cfg;
    one.seed = cfg.seed + r;
    one.restarts = 1;
    ansatze[r] = factory(one.seed);
    results[r] = train(*ansatze[r], h, one, exact);
  });
  RestartResult out;
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    out.finals.push_back(results[r].final_energy);
    if (results[r].final_energy < results[best].final_energy) best = r;
  }
  out.best = std::move(results[best]);
  out.ansatz = std::move(ansatze[best]);
  return out;
}

std::vector<LayerStudyRow> layer_study(AnsatzKind kind, std::span<const std::size_t> layer_counts,
                                       const HamiltonianMatrix& h, const TrainConfig& cfg,
                                       unsigned threads) {
  if (kind == AnsatzKind::Mlp) throw DomainError("layer study applies to circuit ansatze");
  std::vector<LayerStudyRow> rows(layer_counts.size());
  const double exact = ground_state(h).energy;
  parallel_for(layer_counts.size(), threads, [&](std::size_t i) {
    AnsatzSpec spec;
    spec.kind = kind;
    spec.sites = h.basis.sites;
    spec.layers = layer_counts[i];
    spec.complex_mode = !h.is_real;
    const auto best =
        train_best_of([&](std::uint64_t seed) { return make_ansatz(spec, seed); }, h, cfg, 1);
    rows[i] = LayerStudyRow{layer_counts[i], best.best.final_energy, exact};
  });
  return rows;
}

void write_trace_csv(std::ostream& os, const TrainResult& result) {
  const auto old = os.precision(10);
  os << "step,energy,loss\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i)
    os << i << ',' << result.trace[i] << ',' << result.exact_energy - result.trace[i] << '\n';
  os.precision(old);
}

}  // namespace bosehub
