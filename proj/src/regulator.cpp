#include "tandem/regulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tandem {

std::string_view to_string(RegulationMode mode) {
  return mode == RegulationMode::Centralized ? "centralized" : "decentralized";
}

RegulationMode parse_mode(std::string_view text) {
  if (text == "centralized") return RegulationMode::Centralized;
  if (text == "decentralized") return RegulationMode::Decentralized;
  throw std::invalid_argument("unknown regulation mode '" + std::string(text) + "'");
}

GuardConfig GuardConfig::for_cycles(const Vec2& cycle_length, double epsilon_j,
                                    double step_cap_fraction, double min_fraction,
                                    double max_fraction) {
  GuardConfig g;
  g.epsilon_j = epsilon_j;
  for (int i = 0; i < 2; ++i) {
    g.step_cap[i] = step_cap_fraction * cycle_length[i];
    g.theta_min[i] = min_fraction * cycle_length[i];
    g.theta_max[i] = max_fraction * cycle_length[i];
  }
  g.validate();
  return g;
}

void GuardConfig::validate() const {
  if (!(epsilon_j > 0.0)) throw std::invalid_argument("eps_j must be positive");
  for (int i = 0; i < 2; ++i) {
    if (!(step_cap[i] > 0.0)) throw std::invalid_argument("step_cap must be positive");
    if (!(theta_min[i] > 0.0 && theta_min[i] < theta_max[i])) {
      throw std::invalid_argument("theta bounds must satisfy 0 < theta_min < theta_max");
    }
  }
}

Matrix2 invert_gain(const JacobianEstimate& jac, const Matrix2& prev_gain, RegulationMode mode,
                    const GuardConfig& guards) {
  const bool ok11 = std::abs(jac.j11) >= guards.epsilon_j;
  const bool ok22 = std::abs(jac.j22) >= guards.epsilon_j;

  Matrix2 a;
  if (ok11) {
    a.m[0] = {1.0 / jac.j11, 0.0};
  } else {
    a.m[0] = prev_gain.m[0];
  }
  if (mode == RegulationMode::Decentralized) {
    a.m[1] = ok22 ? Vec2{0.0, 1.0 / jac.j22} : prev_gain.m[1];
  } else if (ok11 && ok22) {
    a.m[1] = {-jac.j21 / (jac.j11 * jac.j22), 1.0 / jac.j22};
  } else {
    a.m[1] = prev_gain.m[1];
  }
  return a;
}

ControllerState control_step(const ControllerState& state, const Matrix2& gain,
                             const GuardConfig& guards) {
  Vec2 step = gain * state.e;
  double scale = 1.0;
  for (int i = 0; i < 2; ++i) {
    if (std::abs(step[i]) > guards.step_cap[i]) {
      scale = std::min(scale, guards.step_cap[i] / std::abs(step[i]));
    }
  }
  ControllerState next = state;
  for (int i = 0; i < 2; ++i) {
    if (scale < 1.0) step[i] *= scale;
    next.theta[i] = std::clamp(state.theta[i] + step[i], guards.theta_min[i], guards.theta_max[i]);
  }
  next.gain = gain;
  ++next.k;
  return next;
}

std::vector<CycleRecord> run_closed_loop(const LoopSettings& settings, const Plant& plant) {
  settings.guards.validate();
  if (settings.num_cycles < 0) throw std::invalid_argument("num_cycles must be nonnegative");

  ControllerState state;
  state.theta = settings.theta_init;
  state.gain = settings.initial_gain;
  state.mode = settings.mode;

  std::vector<CycleRecord> out;
  out.reserve(static_cast<std::size_t>(settings.num_cycles));
  JacobianEstimate last_jacobian;
  for (int k = 1; k <= settings.num_cycles; ++k) {
    if (k == 1) {
      state.k = 1;
    } else {
      const Matrix2 gain = invert_gain(last_jacobian, state.gain, settings.mode, settings.guards);
      state = control_step(state, gain, settings.guards);
    }
    const PlantResponse resp = plant(k, state.theta);
    state.y = resp.output;
    state.e = {settings.reference[0] - resp.output[0], settings.reference[1] - resp.output[1]};
    last_jacobian = resp.jacobian;
    out.push_back({k, state.theta, state.y, state.e, resp.jacobian, state.gain});
  }
  return out;
}

}  // namespace tandem
