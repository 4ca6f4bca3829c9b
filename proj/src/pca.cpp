#include "qaml/pca.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <vector>

#include "qaml/errors.hpp"

namespace qaml {

namespace {

Eigen::MatrixXd data_matrix(const LabeledDataset& data) {
  const long n = long(data.size());
  if (n == 0) throw std::invalid_argument("fit_pca: empty dataset");
  const long d = data.images[0].pixels();
  Eigen::MatrixXd x(n, d);
  for (long i = 0; i < n; ++i) {
    if (data.images[i].pixels() != d) {
      throw std::invalid_argument("fit_pca: inconsistent image dimensions");
    }
    x.row(i) = data.images[i].flatten().transpose();
  }
  return x;
}

// Largest-magnitude entry of each column made positive; ties resolved by
// the first index, so the flip is reproducible.
void canonicalize_signs(Eigen::MatrixXd& m) {
  for (long j = 0; j < m.cols(); ++j) {
    long arg = 0;
    m.col(j).cwiseAbs().maxCoeff(&arg);
    if (m(arg, j) < 0) m.col(j) = -m.col(j);
  }
}

// Descending eigenpairs of a symmetric matrix.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> sym_eig_desc(
    const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw EvalError("fit_pca: eigensolver failed to converge");
  }
  const Eigen::VectorXd v = solver.eigenvalues().reverse();
  const Eigen::MatrixXd w = solver.eigenvectors().rowwise().reverse();
  return {v, w};
}

void require_rank(const Eigen::VectorXd& eigs_desc, int output_dim,
                  const char* what) {
  const double scale = std::max(std::abs(eigs_desc[0]), 1.0);
  const double tol = 1e-12 * scale;
  int rank = 0;
  for (long i = 0; i < eigs_desc.size(); ++i) {
    if (eigs_desc[i] > tol) ++rank;
  }
  if (rank < output_dim) {
    throw EvalError(std::string("fit_pca: ") + what + " rank " +
                    std::to_string(rank) + " is below output_dim " +
                    std::to_string(output_dim));
  }
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b, PcaKind kind,
                              double gamma) {
  if (kind == PcaKind::KernelLinear) {
    return a * b.transpose();
  }
  // RBF: exp(-gamma * ||a_i - b_j||^2) via the squared-norm expansion.
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd sq = -2.0 * (a * b.transpose());
  sq.colwise() += an;
  sq.rowwise() += bn.transpose();
  return (-gamma * sq.cwiseMax(0.0)).array().exp();
}

void put_bytes(std::ofstream& f, const void* p, std::size_t n) {
  f.write(static_cast<const char*>(p), std::streamsize(n));
}

void get_bytes(std::ifstream& f, void* p, std::size_t n) {
  f.read(static_cast<char*>(p), std::streamsize(n));
  if (!f) throw FormatError("pca model file truncated");
}

void put_u32(std::ofstream& f, uint32_t v) { put_bytes(f, &v, 4); }
uint32_t get_u32(std::ifstream& f) {
  uint32_t v = 0;
  get_bytes(f, &v, 4);
  return v;
}
void put_f64(std::ofstream& f, double v) { put_bytes(f, &v, 8); }
double get_f64(std::ifstream& f) {
  double v = 0;
  get_bytes(f, &v, 8);
  return v;
}

void put_matrix(std::ofstream& f, const Eigen::MatrixXd& m) {
  put_bytes(f, m.data(), sizeof(double) * std::size_t(m.size()));
}

void get_matrix(std::ifstream& f, Eigen::MatrixXd& m) {
  get_bytes(f, m.data(), sizeof(double) * std::size_t(m.size()));
}

}  // namespace

double default_rbf_gamma(const Eigen::MatrixXd& x) {
  const long n = std::min<long>(x.rows(), 512);
  const long d = x.cols();
  std::vector<double> dists;
  dists.reserve(std::size_t(n) * std::size_t(n - 1) / 2);
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      dists.push_back((x.row(i) - x.row(j)).squaredNorm());
    }
  }
  if (dists.empty()) {
    throw std::invalid_argument("default_rbf_gamma: need at least two rows");
  }
  std::nth_element(dists.begin(), dists.begin() + long(dists.size()) / 2,
                   dists.end());
  const double median = dists[dists.size() / 2];
  if (median <= 0.0) {
    throw EvalError("default_rbf_gamma: degenerate (zero) median distance");
  }
  return 1.0 / (double(d) * median);
}

PcaModel fit_pca(const LabeledDataset& data, PcaKind kind, int output_dim,
                 std::optional<double> kernel_gamma) {
  if (output_dim < 1) {
    throw std::invalid_argument("fit_pca: output_dim must be >= 1");
  }
  const Eigen::MatrixXd x = data_matrix(data);
  const long n = x.rows();
  const long d = x.cols();
  if (n < output_dim + 1) {
    throw std::invalid_argument("fit_pca: need at least output_dim + 1 samples");
  }

  PcaModel m;
  m.kind = kind;
  m.input_dim = int(d);
  m.output_dim = output_dim;
  m.mean = x.colwise().mean();

  if (kind == PcaKind::Linear) {
    const Eigen::MatrixXd xc = x.rowwise() - m.mean.transpose();
    const Eigen::MatrixXd cov = (xc.transpose() * xc) / double(n - 1);
    auto [eigs, vecs] = sym_eig_desc(cov);
    require_rank(eigs, output_dim, "covariance");
    m.components = vecs.leftCols(output_dim);
    canonicalize_signs(m.components);
    m.eigenvalues = eigs.head(output_dim);
    m.total_variance = eigs.cwiseMax(0.0).sum();
    return m;
  }

  // Kernel PCA. Gamma only applies to the RBF kernel.
  if (kind == PcaKind::KernelRbf) {
    m.kernel_gamma = kernel_gamma ? *kernel_gamma : default_rbf_gamma(x);
    if (m.kernel_gamma <= 0.0) {
      throw std::invalid_argument("fit_pca: kernel_gamma must be positive");
    }
  } else if (kernel_gamma) {
    throw std::invalid_argument("fit_pca: gamma is an RBF-kernel parameter");
  }

  m.train_points = x;
  const Eigen::MatrixXd k = kernel_matrix(x, x, kind, m.kernel_gamma);
  m.kernel_row_means = k.rowwise().mean();
  m.kernel_mean = k.mean();

  // Double centering: Kc = K - 1K - K1 + 1K1.
  Eigen::MatrixXd kc = k;
  kc.colwise() -= m.kernel_row_means;
  kc.rowwise() -= m.kernel_row_means.transpose();
  kc.array() += m.kernel_mean;

  auto [eigs, vecs] = sym_eig_desc(kc);
  require_rank(eigs, output_dim, "centered kernel");
  m.eigenvalues = eigs.head(output_dim);
  m.total_variance = eigs.cwiseMax(0.0).sum();

  // Dual coefficients alpha_i = a_i / sqrt(lambda_i); projections of the
  // training rows are then sqrt(lambda_i) * a_i.
  m.components.resize(n, output_dim);
  for (int j = 0; j < output_dim; ++j) {
    const double lam = m.eigenvalues[j];
    m.components.col(j) = vecs.col(j) / std::sqrt(lam);
  }
  canonicalize_signs(m.components);
  m.train_projections = kc * m.components;
  return m;
}

Eigen::VectorXd pca_transform_flat(const PcaModel& model,
                                   const Eigen::VectorXd& flat) {
  if (flat.size() != model.input_dim) {
    throw std::invalid_argument("pca_transform: dimension mismatch (got " +
                                std::to_string(flat.size()) + ", model has " +
                                std::to_string(model.input_dim) + ")");
  }
  if (model.kind == PcaKind::Linear) {
    return model.components.transpose() * (flat - model.mean);
  }
  const Eigen::MatrixXd kx = kernel_matrix(
      flat.transpose(), model.train_points, model.kind, model.kernel_gamma);
  // Center k(x, .) against the training Gram statistics.
  Eigen::RowVectorXd kc = kx.row(0);
  kc.array() -= kc.mean();
  kc -= model.kernel_row_means.transpose();
  kc.array() += model.kernel_mean;
  return (kc * model.components).transpose();
}

Eigen::VectorXd pca_transform(const PcaModel& model, const ImageTensor& image) {
  return pca_transform_flat(model, image.flatten());
}

Eigen::MatrixXd pca_transform_all(const PcaModel& model,
                                  const LabeledDataset& data) {
  Eigen::MatrixXd out(long(data.size()), model.output_dim);
  for (long i = 0; i < out.rows(); ++i) {
    out.row(i) = pca_transform(model, data.images[std::size_t(i)]).transpose();
  }
  return out;
}

Eigen::VectorXd explained_variance_ratio(const PcaModel& model) {
  if (model.total_variance <= 0.0) {
    throw EvalError("explained_variance_ratio: no variance in the fit data");
  }
  return model.eigenvalues / model.total_variance;
}

void save_pca(const PcaModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f.write("QPCA", 4);
  put_u32(f, 1);  // version
  put_u32(f, uint32_t(model.kind));
  put_u32(f, uint32_t(model.input_dim));
  put_u32(f, uint32_t(model.output_dim));
  const uint32_t n_train =
      model.kind == PcaKind::Linear ? 0 : uint32_t(model.train_points.rows());
  put_u32(f, n_train);
  put_f64(f, model.kernel_gamma);
  put_f64(f, model.total_variance);
  put_f64(f, model.kernel_mean);
  put_matrix(f, model.mean);
  put_matrix(f, model.eigenvalues);
  put_matrix(f, model.components);
  if (n_train > 0) {
    // Row-major on disk for train_points, matching the documented layout.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                        Eigen::RowMajor>
        tp = model.train_points;
    put_bytes(f, tp.data(), sizeof(double) * std::size_t(tp.size()));
    put_matrix(f, model.kernel_row_means);
    put_matrix(f, model.train_projections);
  }
  if (!f) throw FormatError("write failed: " + path);
}

PcaModel load_pca(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open: " + path);
  char magic[4] = {};
  get_bytes(f, magic, 4);
  if (std::memcmp(magic, "QPCA", 4) != 0) {
    throw FormatError("bad pca model magic in " + path);
  }
  const uint32_t version = get_u32(f);
  if (version != 1) {
    throw FormatError("unsupported pca model version " +
                      std::to_string(version));
  }
  PcaModel m;
  const uint32_t kind = get_u32(f);
  if (kind > 2) throw FormatError("bad pca kind code " + std::to_string(kind));
  m.kind = PcaKind(kind);
  m.input_dim = int(get_u32(f));
  m.output_dim = int(get_u32(f));
  const uint32_t n_train = get_u32(f);
  m.kernel_gamma = get_f64(f);
  m.total_variance = get_f64(f);
  m.kernel_mean = get_f64(f);
  m.mean.resize(m.input_dim);
  m.eigenvalues.resize(m.output_dim);
  get_bytes(f, m.mean.data(), sizeof(double) * std::size_t(m.mean.size()));
  get_bytes(f, m.eigenvalues.data(),
            sizeof(double) * std::size_t(m.eigenvalues.size()));
  const long comp_rows = m.kind == PcaKind::Linear ? m.input_dim : n_train;
  m.components.resize(comp_rows, m.output_dim);
  get_matrix(f, m.components);
  if (n_train > 0) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tp(
        n_train, m.input_dim);
    get_bytes(f, tp.data(), sizeof(double) * std::size_t(tp.size()));
    m.train_points = tp;
    m.kernel_row_means.resize(n_train);
    get_bytes(f, m.kernel_row_means.data(), sizeof(double) * n_train);
    m.train_projections.resize(n_train, m.output_dim);
    get_matrix(f, m.train_projections);
  }
  return m;
}

}  // namespace qaml
