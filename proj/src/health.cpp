#include "hero/health.hpp"

#include <algorithm>
#include <cmath>

#include "hero/errors.hpp"

namespace hero {

const char* to_string(CheckId id) {
  switch (id) {
    case CheckId::Rate: return "rate";
    case CheckId::Jump: return "jump";
    case CheckId::Divergence: return "divergence";
    case CheckId::SensorData: return "sensor_data";
    case CheckId::Vote: return "vote";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::SoftFail: return "soft_fail";
    case Verdict::HardFail: return "hard_fail";
  }
  return "?";
}

bool CheckConfig::valid() const {
  return nominal_rate > 0 && gap_factor >= 1.0 && v_max > 0 && jump_margin > 0 &&
         cov_trace_max > 0 && intensity_min > 0 && intensity_var_min > 0 &&
         invalid_fraction_max > 0 && vote_k > 0 && mad_floor > 0;
}

CheckResult rate_check(double last_stamp, double now, const CheckConfig& cfg) {
  const double gap = now - last_stamp;
  const double period = 1.0 / cfg.nominal_rate;
  CheckResult res{CheckId::Rate, Verdict::Pass, gap};
  if (gap <= cfg.gap_factor * period) {
    res.verdict = Verdict::Pass;
  } else if (gap <= 2.0 * cfg.gap_factor * period) {
    res.verdict = Verdict::SoftFail;
  } else {
    res.verdict = Verdict::HardFail;
  }
  return res;
}

CheckResult jump_check(const RobotState& prev, int prev_epoch, const OdometryMessage& msg,
                       const CheckConfig& cfg) {
  if (msg.init_epoch != prev_epoch) {
    throw EpochMismatch("jump_check across init epochs " + std::to_string(prev_epoch) +
                        " vs " + std::to_string(msg.init_epoch));
  }
  const double dt = msg.stamp - prev.stamp;
  const double step = (msg.pose->t - prev.p).norm();
  const double bound = cfg.v_max * dt + cfg.jump_margin;
  CheckResult res{CheckId::Jump, step <= bound ? Verdict::Pass : Verdict::HardFail, step};
  return res;
}

CheckResult divergence_check(const CovarianceBlock& cov, const CheckConfig& cfg) {
  if (!is_valid_covariance(cov.position)) {
    throw InvalidCovariance("position covariance violates symmetry/PSD invariant");
  }
  const double trace = cov.position.trace();
  CheckResult res{CheckId::Divergence,
                  trace <= cfg.cov_trace_max ? Verdict::Pass : Verdict::HardFail, trace};
  return res;
}

CheckResult sensor_data_check(const SensorStats& stats, const CheckConfig& cfg) {
  CheckResult res{CheckId::SensorData, Verdict::Pass, 0.0};
  if (stats.output_rate < cfg.nominal_rate / cfg.gap_factor) {
    res.verdict = Verdict::SoftFail;
    res.detail = stats.output_rate;
  } else if (stats.intensity_mean < cfg.intensity_min) {
    res.verdict = Verdict::SoftFail;
    res.detail = stats.intensity_mean;
  } else if (stats.intensity_var < cfg.intensity_var_min) {
    res.verdict = Verdict::SoftFail;
    res.detail = stats.intensity_var;
  } else if (stats.invalid_fraction > cfg.invalid_fraction_max) {
    res.verdict = Verdict::SoftFail;
    res.detail = stats.invalid_fraction;
  }
  return res;
}

double median(std::vector<double> values) {
  const size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double median_absolute_deviation(const std::vector<double>& values, double med) {
  std::vector<double> dev(values.size());
  for (size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - med);
  return median(std::move(dev));
}

std::map<std::string, CheckResult> voting_check(
    const std::vector<std::pair<std::string, Vec3>>& velocities, const CheckConfig& cfg) {
  if (velocities.size() < 3) {
    throw InsufficientStreams("voting needs >= 3 streams, got " +
                              std::to_string(velocities.size()));
  }
  std::map<std::string, CheckResult> out;
  for (const auto& [id, v] : velocities) {
    (void)v;
    out[id] = CheckResult{CheckId::Vote, Verdict::Pass, 0.0};
  }
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> vals;
    vals.reserve(velocities.size());
    for (const auto& [id, v] : velocities) vals.push_back(v[axis]);
    const double med = median(vals);
    const double mad = median_absolute_deviation(vals, med);
    const double scale = cfg.vote_k * std::max(mad, cfg.mad_floor);
    for (const auto& [id, v] : velocities) {
      const double dev = std::abs(v[axis] - med);
      if (dev > scale) {
        auto& res = out[id];
        res.verdict = Verdict::HardFail;
        res.detail = std::max(res.detail, dev);
      }
    }
  }
  return out;
}

}  // namespace hero
