#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eqmflow/lie.hpp"
#include "eqmflow/serialize.hpp"

namespace eqmflow {

struct Diagnostics {
  double norm = 0.0;
  double Q_value = 0.0;
  double spectrum_drift = 0.0;
  double fs_distance_to_initial = 0.0;
};

/// Time samples of a flow: states (vectors or density matrices, or none for
/// purely classical runs), coadjoint coordinates and per-sample diagnostics.
struct Trajectory {
  enum class StateKind { None, Pure, Density };

  StateKind kind = StateKind::None;
  int dim = 0;
  int n_coords = 0;
  std::vector<double> times;
  std::vector<Vector> pure;
  std::vector<Matrix> density;
  std::vector<RealVector> F;
  std::vector<Diagnostics> diag;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }

  double max_norm_deviation() const {
    double w = 0.0;
    for (const auto& d : diag) w = std::max(w, std::abs(d.norm - 1.0));
    return w;
  }
  double max_spectrum_drift() const {
    double w = 0.0;
    for (const auto& d : diag) w = std::max(w, d.spectrum_drift);
    return w;
  }
  double max_Q_drift() const {
    double w = 0.0;
    for (const auto& d : diag) w = std::max(w, std::abs(d.Q_value - diag.front().Q_value));
    return w;
  }

  /// Columns of the CSV form: t, state, F_1..F_n, four diagnostics.
  std::vector<std::string> csv_header() const {
    std::vector<std::string> h{"t"};
    if (kind == StateKind::Pure)
      for (int i = 0; i < dim; ++i) {
        h.push_back("re_psi_" + std::to_string(i));
        h.push_back("im_psi_" + std::to_string(i));
      }
    if (kind == StateKind::Density)
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
          h.push_back("re_rho_" + std::to_string(i) + "_" + std::to_string(j));
          h.push_back("im_rho_" + std::to_string(i) + "_" + std::to_string(j));
        }
    for (int k = 1; k <= n_coords; ++k) h.push_back("F_" + std::to_string(k));
    for (const char* d : {"norm", "Q_value", "spectrum_drift", "fs_distance_to_initial"}) h.emplace_back(d);
    return h;
  }
};

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  const auto header = tr.csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (std::size_t s = 0; s < tr.size(); ++s) {
    os << format_double(tr.times[s]);
    auto put = [&](double v) { os << "," << format_double(v); };
    if (tr.kind == Trajectory::StateKind::Pure)
      for (int i = 0; i < tr.dim; ++i) {
        put(tr.pure[s](i).real());
        put(tr.pure[s](i).imag());
      }
    if (tr.kind == Trajectory::StateKind::Density)
      for (int i = 0; i < tr.dim; ++i)
        for (int j = i; j < tr.dim; ++j) {
          put(tr.density[s](i, j).real());
          put(tr.density[s](i, j).imag());
        }
    for (int k = 0; k < tr.n_coords; ++k) put(tr.F[s](k));
    const Diagnostics& d = tr.diag[s];
    put(d.norm);
    put(d.Q_value);
    put(d.spectrum_drift);
    put(d.fs_distance_to_initial);
    os << "\n";
  }
  return os.str();
}

inline Json trajectory_json(const Trajectory& tr) {
  Json j;
  j["kind"] = tr.kind == Trajectory::StateKind::Pure ? "pure" : tr.kind == Trajectory::StateKind::Density ? "density" : "none";
  j["dim"] = tr.dim;
  j["t"] = tr.times;
  Json states = Json::array(), F = Json::array();
  Json norm = Json::array(), qv = Json::array(), sd = Json::array(), fs = Json::array();
  for (std::size_t s = 0; s < tr.size(); ++s) {
    if (tr.kind == Trajectory::StateKind::Pure) states.push_back(vector_to_json(tr.pure[s]));
    if (tr.kind == Trajectory::StateKind::Density) states.push_back(matrix_to_json(tr.density[s]));
    F.push_back(tr.n_coords > 0 ? real_vector_to_json(tr.F[s]) : Json::array());
    norm.push_back(tr.diag[s].norm);
    qv.push_back(tr.diag[s].Q_value);
    sd.push_back(tr.diag[s].spectrum_drift);
    fs.push_back(tr.diag[s].fs_distance_to_initial);
  }
  j["states"] = std::move(states);
  j["F"] = std::move(F);
  j["norm"] = std::move(norm);
  j["Q_value"] = std::move(qv);
  j["spectrum_drift"] = std::move(sd);
  j["fs_distance_to_initial"] = std::move(fs);
  return j;
}

inline Trajectory trajectory_from_json(const Json& j) {
  Trajectory tr;
  const std::string kind = j.at("kind").get<std::string>();
  tr.kind = kind == "pure" ? Trajectory::StateKind::Pure
            : kind == "density" ? Trajectory::StateKind::Density
                                : Trajectory::StateKind::None;
  tr.dim = j.at("dim").get<int>();
  tr.times = j.at("t").get<std::vector<double>>();
  for (std::size_t s = 0; s < tr.times.size(); ++s) {
    if (tr.kind == Trajectory::StateKind::Pure) tr.pure.push_back(vector_from_json(j["states"][s]));
    if (tr.kind == Trajectory::StateKind::Density) tr.density.push_back(matrix_from_json(j["states"][s]));
    tr.F.push_back(real_vector_from_json(j["F"][s], "F"));
    tr.diag.push_back({j["norm"][s].get<double>(), j["Q_value"][s].get<double>(), j["spectrum_drift"][s].get<double>(),
                       j["fs_distance_to_initial"][s].get<double>()});
  }
  tr.n_coords = tr.F.empty() ? 0 : static_cast<int>(tr.F.front().size());
  return tr;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

enum class TrajectoryFormat { Csv, Json };

inline void emit_trajectory(const Trajectory& tr, TrajectoryFormat fmt, const std::string& path) {
  write_text_file(path, fmt == TrajectoryFormat::Csv ? trajectory_csv(tr) : trajectory_json(tr).dump(1) + "\n");
}

/// sqrt(2) times the Bures angle; equals fs_distance on pure states.
inline double bures_distance(const Matrix& a, const Matrix& b) {
  const Matrix sa = hermitian_function(hermitian_part(a), [](double v) { return std::sqrt(std::max(v, 0.0)); });
  const Matrix m = hermitian_part(sa * b * sa);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  double fid = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) fid += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return std::sqrt(2.0) * std::acos(std::min(1.0, fid));
}

/// Fills diagnostics for states appended to a trajectory.
class Recorder {
 public:
  Recorder(Trajectory& tr, std::function<double(const Matrix&)> q_of_density = {},
           std::function<double(const Vector&)> q_of_vector = {}, const LieRepresentation* rep = nullptr)
      : tr_(tr), qd_(std::move(q_of_density)), qv_(std::move(q_of_vector)), rep_(rep) {}

  void pure(double t, const Vector& x) {
    if (tr_.empty()) {
      tr_.kind = Trajectory::StateKind::Pure;
      tr_.dim = static_cast<int>(x.size());
      tr_.n_coords = rep_ ? rep_->algebra.n : 0;
      x0_ = x;
    }
    Diagnostics d;
    d.norm = x.norm();
    d.Q_value = qv_ ? qv_(x) : 0.0;
    d.spectrum_drift = std::abs(x.squaredNorm() - x0_.squaredNorm());
    d.fs_distance_to_initial = fs_distance(x0_, x);
    tr_.times.push_back(t);
    tr_.pure.push_back(x);
    tr_.F.push_back(rep_ ? momentum_map(*rep_, x) : RealVector());
    tr_.diag.push_back(d);
  }

  void density(double t, const Matrix& rho) {
    if (tr_.empty()) {
      tr_.kind = Trajectory::StateKind::Density;
      tr_.dim = static_cast<int>(rho.rows());
      tr_.n_coords = rep_ ? rep_->algebra.n : 0;
      rho0_ = rho;
      spec0_ = eigenvalues_descending(rho);
    }
    Diagnostics d;
    d.norm = rho.trace().real();
    d.Q_value = qd_ ? qd_(rho) : 0.0;
    d.spectrum_drift = (eigenvalues_descending(rho) - spec0_).cwiseAbs().maxCoeff();
    d.fs_distance_to_initial = bures_distance(rho0_, rho);
    tr_.times.push_back(t);
    tr_.density.push_back(rho);
    tr_.F.push_back(rep_ ? momentum_map(*rep_, rho) : RealVector());
    tr_.diag.push_back(d);
  }

 private:
  Trajectory& tr_;
  std::function<double(const Matrix&)> qd_;
  std::function<double(const Vector&)> qv_;
  const LieRepresentation* rep_;
  Vector x0_;
  RealVector spec0_;
  Matrix rho0_;
};

}  // namespace eqmflow
