#include "zdalab/observer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace zdalab {

ObserverState initialize_observer(const StackedState& true_init,
                                  const std::optional<VectorXcd>& false_data) {
  ObserverState obs;
  obs.q = true_init.x;
  obs.w = true_init.v;
  if (false_data) {
    if (false_data->size() != 2 * true_init.n())
      throw std::invalid_argument("false data must have length 2n");
    obs.q += false_data->head(true_init.n()).real();
    obs.w += false_data->tail(true_init.n()).real();
  }
  obs.r_integral = VectorXd();  // sized on first step
  return obs;
}

std::pair<ObserverState, VectorXd> observer_step(const ObserverState& obs,
                                                 const VectorXd& measurement,
                                                 const Topology& topology,
                                                 const OutputConfig& cfg, double dt,
                                                 bool integral_branch) {
  return observer_step(obs, measurement, laplacian(topology), cfg, dt, integral_branch);
}

std::pair<ObserverState, VectorXd> observer_step(const ObserverState& obs,
                                                 const VectorXd& measurement, const MatrixXd& l,
                                                 const OutputConfig& cfg, double dt,
                                                 bool integral_branch) {
  const int n = static_cast<int>(l.rows());
  cfg.validate(n);
  if (measurement.size() != cfg.m())
    throw std::invalid_argument("measurement size must match monitored set");

  ObserverState next = obs;
  if (next.r_integral.size() != cfg.m()) next.r_integral = VectorXd::Zero(cfg.m());

  VectorXd residual(cfg.m());
  for (Eigen::Index k = 0; k < cfg.m(); ++k) {
    const int i = cfg.monitored[static_cast<std::size_t>(k)];
    residual(k) = cfg.c1(k) * obs.q(i) + cfg.c2(k) * obs.w(i) - measurement(k);
  }

  // Injection held constant over the step (explicit scheme).
  VectorXd inj = VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < cfg.m(); ++k) {
    const int i = cfg.monitored[static_cast<std::size_t>(k)];
    if (cfg.c1(k) != 0.0 || !integral_branch)
      inj(i) = residual(k);
    else
      inj(i) = next.r_integral(k);
  }

  VectorXd y(2 * n);
  y << obs.q, obs.w;
  const auto rhs = [&](double, const VectorXd& s) -> VectorXd {
    VectorXd ds(2 * n);
    ds.head(n) = s.tail(n);
    ds.tail(n) = -s.tail(n) - l * s.head(n) - inj;
    return ds;
  };
  y = rk4_step(rhs, 0.0, y, dt);
  next.q = y.head(n);
  next.w = y.tail(n);
  next.r_integral += dt * residual;
  return {next, residual};
}

DetectionVerdict detect(ResidualTrace& trace) {
  trace.first_detection.reset();
  DetectionVerdict verdict;
  if (trace.residuals.empty()) return verdict;
  const int needed = std::max(1, trace.debounce);
  int run = 0;
  for (std::size_t k = 0; k < trace.residuals.size(); ++k) {
    const double peak = trace.residuals[k].size() ? trace.residuals[k].cwiseAbs().maxCoeff() : 0.0;
    if (peak > trace.threshold) {
      ++run;
      if (run >= needed) {
        const std::size_t start = k + 1 - static_cast<std::size_t>(needed);
        trace.first_detection = trace.times[start];
        verdict.attack_detected = true;
        verdict.time = trace.times[start];
        return verdict;
      }
    } else {
      run = 0;
    }
  }
  return verdict;
}

void ResidualTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const Eigen::Index m = residuals.empty() ? 0 : residuals.front().size();
  out << "t";
  for (Eigen::Index i = 1; i <= m; ++i) out << ",r" << i;
  out << ",detected\n";
  char buf[40];
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", times[k]);
    out << buf;
    for (Eigen::Index i = 0; i < m; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", residuals[k](i));
      out << ',' << buf;
    }
    const bool det = first_detection && times[k] >= *first_detection;
    out << ',' << (det ? 1 : 0) << '\n';
  }
}

}  // namespace zdalab
