#pragma once

// File formats: trajectory CSV (17 significant digits), metrics JSON, and
// the versioned little-endian weight-schedule binary with its JSON sidecar.

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "rnqg/errors.hpp"
#include "rnqg/simulate.hpp"
#include "rnqg/value_approx.hpp"

namespace rnqg {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Header is t,x1..xn,u[,u2..],w[,w2..],v1..vn,y1..yr; single-channel inputs
/// and disturbances drop the index.
inline std::string trajectory_csv(const TrajectoryRecord& traj) {
  if (traj.times.empty()) return "";
  const Eigen::Index n = traj.states.front().size();
  const Eigen::Index m = traj.inputs.front().size();
  const Eigen::Index qw = traj.disturbances.front().size();
  const Eigen::Index r = traj.outputs.front().size();

  std::string out = "t";
  for (Eigen::Index i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  if (m == 1) {
    out += ",u";
  } else {
    for (Eigen::Index i = 0; i < m; ++i) out += ",u" + std::to_string(i + 1);
  }
  if (qw == 1) {
    out += ",w";
  } else {
    for (Eigen::Index i = 0; i < qw; ++i) out += ",w" + std::to_string(i + 1);
  }
  for (Eigen::Index i = 0; i < n; ++i) out += ",v" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < r; ++i) out += ",y" + std::to_string(i + 1);
  out += "\n";

  for (std::size_t row = 0; row < traj.times.size(); ++row) {
    out += format_double(traj.times[row]);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + format_double(traj.states[row](i));
    for (Eigen::Index i = 0; i < m; ++i) out += "," + format_double(traj.inputs[row](i));
    for (Eigen::Index i = 0; i < qw; ++i) out += "," + format_double(traj.disturbances[row](i));
    for (Eigen::Index i = 0; i < n; ++i) out += "," + format_double(traj.noises[row](i));
    for (Eigen::Index i = 0; i < r; ++i) out += "," + format_double(traj.outputs[row](i));
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json metrics_json(int case_id, const std::string& controller,
                                           std::uint64_t seed, const Metrics& m) {
  nlohmann::ordered_json j;
  j["case"] = case_id;
  j["controller"] = controller;
  j["seed"] = seed;
  j["iae"] = m.iae;
  j["itae"] = m.itae;
  j["cef"] = m.cef;
  return j;
}

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(out, bits);
}

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }
  std::string bytes(std::size_t count) {
    need(count);
    std::string out = data_.substr(pos_, count);
    pos_ += count;
    return out;
  }
  bool exhausted() const { return pos_ == data_.size(); }

 private:
  unsigned char byte() { return static_cast<unsigned char>(data_[pos_++]); }
  void need(std::size_t count) {
    if (pos_ + count > data_.size()) {
      fail(ErrorCode::ConfigError, "schedule file truncated");
    }
  }
  const std::string& data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline constexpr char kScheduleMagic[] = "RNQGWS01";

inline std::string serialize_schedule(const WeightSchedule& sched) {
  std::string out(kScheduleMagic, 8);
  detail::put_u32(out, static_cast<std::uint32_t>(sched.basis.dim));
  detail::put_u32(out, static_cast<std::uint32_t>(sched.basis.degree));
  detail::put_u32(out, static_cast<std::uint32_t>(sched.basis.count()));
  detail::put_u32(out, static_cast<std::uint32_t>(sched.horizon));
  detail::put_u32(out, static_cast<std::uint32_t>(sched.eta));
  detail::put_u32(out, sched.mode == TrainingMode::Greedy ? 1u : 0u);
  detail::put_u32(out, sched.converged ? 1u : 0u);
  detail::put_u64(out, sched.seed);
  detail::put_f64(out, sched.dt);
  detail::put_f64(out, sched.stage_scale);
  for (const auto& term : sched.basis.terms) {
    for (int e : term) detail::put_u32(out, static_cast<std::uint32_t>(e));
  }
  for (int i = 0; i < sched.basis.dim; ++i) detail::put_f64(out, sched.domain.lower(i));
  for (int i = 0; i < sched.basis.dim; ++i) detail::put_f64(out, sched.domain.upper(i));
  for (const auto& w : sched.weights_by_step) {
    for (Eigen::Index i = 0; i < w.size(); ++i) detail::put_f64(out, w(i));
  }
  detail::put_u32(out, static_cast<std::uint32_t>(sched.step_deltas.size()));
  for (double d : sched.step_deltas) detail::put_f64(out, d);
  return out;
}

inline WeightSchedule deserialize_schedule(const std::string& data) {
  if (data.size() < 8 || data.compare(0, 8, kScheduleMagic, 8) != 0) {
    fail(ErrorCode::ConfigError, "not a weight-schedule file (bad magic)");
  }
  detail::Reader reader(data);
  reader.bytes(8);
  WeightSchedule sched;
  const int dim = static_cast<int>(reader.u32());
  const int degree = static_cast<int>(reader.u32());
  const int count = static_cast<int>(reader.u32());
  sched.horizon = static_cast<int>(reader.u32());
  sched.eta = static_cast<int>(reader.u32());
  sched.mode = reader.u32() == 1 ? TrainingMode::Greedy : TrainingMode::DriftOnly;
  sched.converged = reader.u32() == 1;
  sched.seed = reader.u64();
  sched.dt = reader.f64();
  sched.stage_scale = reader.f64();
  sched.basis.dim = dim;
  sched.basis.degree = degree;
  sched.basis.terms.assign(count, std::vector<int>(dim, 0));
  for (auto& term : sched.basis.terms) {
    for (int& e : term) e = static_cast<int>(reader.u32());
  }
  sched.domain.lower = VectorXd(dim);
  sched.domain.upper = VectorXd(dim);
  for (int i = 0; i < dim; ++i) sched.domain.lower(i) = reader.f64();
  for (int i = 0; i < dim; ++i) sched.domain.upper(i) = reader.f64();
  sched.weights_by_step.assign(sched.horizon + 1, VectorXd(count));
  for (auto& w : sched.weights_by_step) {
    for (int i = 0; i < count; ++i) w(i) = reader.f64();
  }
  const std::uint32_t n_deltas = reader.u32();
  sched.step_deltas.resize(n_deltas);
  for (auto& d : sched.step_deltas) d = reader.f64();
  if (!reader.exhausted()) {
    fail(ErrorCode::ConfigError, "schedule file has trailing bytes");
  }
  return sched;
}

/// Human-readable companion of the binary schedule.
inline nlohmann::ordered_json schedule_sidecar_json(const WeightSchedule& sched) {
  nlohmann::ordered_json j;
  j["format"] = kScheduleMagic;
  j["dim"] = sched.basis.dim;
  j["degree"] = sched.basis.degree;
  j["count"] = sched.basis.count();
  j["horizon"] = sched.horizon;
  j["eta"] = sched.eta;
  j["seed"] = sched.seed;
  j["mode"] = sched.mode == TrainingMode::Greedy ? "greedy" : "drift-only";
  j["dt"] = sched.dt;
  j["stage_scale"] = sched.stage_scale;
  j["converged"] = sched.converged;
  j["terms"] = sched.basis.terms;
  j["domain"]["lower"] = std::vector<double>(sched.domain.lower.data(),
                                             sched.domain.lower.data() + sched.basis.dim);
  j["domain"]["upper"] = std::vector<double>(sched.domain.upper.data(),
                                             sched.domain.upper.data() + sched.basis.dim);
  j["final_weights"] = std::vector<double>(
      sched.final_weights().data(), sched.final_weights().data() + sched.basis.count());
  return j;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ConfigError, "cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// FNV-1a 64-bit content hash, used for run manifests.
inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

}  // namespace rnqg
