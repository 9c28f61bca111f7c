#include "changeforge/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace changeforge {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

struct Header {
  int width, height, maxval;
};

Header read_header(std::istream& in, const std::string& magic, const std::string& path) {
  if (header_token(in) != magic) throw std::runtime_error(path + ": expected " + magic + " header");
  Header h{};
  try {
    h.width = std::stoi(header_token(in));
    h.height = std::stoi(header_token(in));
    h.maxval = std::stoi(header_token(in));
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": malformed header");
  }
  if (h.width < 1 || h.height < 1) throw std::runtime_error(path + ": malformed header");
  if (h.maxval < 1 || h.maxval > 255) throw std::runtime_error(path + ": unsupported maxval " + std::to_string(h.maxval));
  return h;
}

std::uint8_t to_byte(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("image intensities must be finite");
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_raw(const std::string& path, const std::string& header, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header;
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint8_t> read_raw(std::istream& in, std::size_t count, const std::string& path) {
  std::vector<std::uint8_t> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) throw std::runtime_error(path + ": truncated pixel data");
  return bytes;
}

}  // namespace

Eigen::VectorXd vectorize_column_major(const GridImage& img) {
  return Eigen::Map<const Eigen::VectorXd>(img.Y.data(), img.Y.size());
}

GridImage devectorize_column_major(const Eigen::VectorXd& y, int rows, int cols) {
  if (rows < 1 || cols < 1 || y.size() != static_cast<Eigen::Index>(rows) * cols)
    throw std::invalid_argument("vector length does not match the image shape");
  return {Eigen::Map<const Eigen::MatrixXd>(y.data(), rows, cols)};
}

SparseRowMatrix grid_difference_matrix(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("image dimensions must be positive");
  int nv = cols * (rows - 1), nh = rows * (cols - 1);
  SparseRowMatrix D(nv + nh, rows * cols);
  std::vector<Eigen::Triplet<double>> tr;
  int k = 0;
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r + 1 < rows; ++r, ++k) {
      tr.emplace_back(k, c * rows + r, -1.0);
      tr.emplace_back(k, c * rows + r + 1, 1.0);
    }
  for (int c = 0; c + 1 < cols; ++c)
    for (int r = 0; r < rows; ++r, ++k) {
      tr.emplace_back(k, c * rows + r, -1.0);
      tr.emplace_back(k, (c + 1) * rows + r, 1.0);
    }
  D.setFromTriplets(tr.begin(), tr.end());
  return D;
}

double soft_threshold(double a, double delta) {
  if (std::abs(a) <= delta) return 0.0;
  return a > 0.0 ? a - delta : a + delta;
}

AdmmResult tv_admm(const Eigen::VectorXd& y, const SparseRowMatrix& D, double lambda, const AdmmConfig& cfg) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (!(cfg.rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  if (D.cols() != y.size()) throw std::invalid_argument("structure matrix width must match the data");
  AdmmResult res;
  if (lambda == 0.0) {
    res.mu = y;
    res.converged = true;
    res.objective.push_back(0.0);
    return res;
  }
  const double rho = cfg.rho;
  Eigen::SparseMatrix<double> Dc = D;  // column major for the solver
  Eigen::SparseMatrix<double> A = rho * Eigen::SparseMatrix<double>(Dc.transpose() * Dc);
  Eigen::SparseMatrix<double> I(y.size(), y.size());
  I.setIdentity();
  A += I;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(A);
  if (chol.info() != Eigen::Success) throw std::runtime_error("factorisation of I + rho D^T D failed");

  Eigen::VectorXd mu = y;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(D.rows()), u = z, Dmu, z_prev;
  const double kappa = lambda / rho;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    mu = chol.solve(y + rho * (Dc.transpose() * (z - u)));
    Dmu = D * mu;
    z_prev = z;
    Eigen::VectorXd v = Dmu + u;
    for (Eigen::Index j = 0; j < v.size(); ++j) z(j) = soft_threshold(v(j), kappa);
    u += Dmu - z;
    res.iterations = it;
    res.primal_residual = (Dmu - z).norm();
    res.dual_residual = rho * (Dc.transpose() * (z - z_prev)).norm();
    res.objective.push_back(0.5 * (y - mu).squaredNorm() + lambda * Dmu.lpNorm<1>());
    if (res.primal_residual <= cfg.primal_tol && res.dual_residual <= cfg.dual_tol) {
      res.converged = true;
      break;
    }
  }
  res.mu = std::move(mu);
  return res;
}

std::vector<Irfl2dStack> irfl_2d(const GridImage& img, const std::vector<double>& lambdas, const IrflConfig& cfg,
                                 const AdmmConfig& admm) {
  if (lambdas.empty()) throw std::invalid_argument("lambda grid is empty");
  validate(cfg);
  Eigen::VectorXd y = vectorize_column_major(img);
  SparseRowMatrix D0 = grid_difference_matrix(img.rows(), img.cols());
  std::vector<Irfl2dStack> out;
  for (double lambda : lambdas) {
    // Per-lambda state starts fresh from unit weights.
    Irfl2dStack st;
    st.lambda = lambda;
    Eigen::VectorXd w = Eigen::VectorXd::Ones(D0.rows());
    for (int i = 1; i <= cfg.max_iterations; ++i) {
      SparseRowMatrix D = w.asDiagonal() * D0;
      AdmmResult r = tv_admm(y, D, lambda, admm);
      w = reweight(D0 * r.mu, cfg.epsilon);
      st.iterates.push_back(r.mu);
      r.mu.resize(0);
      st.solves.push_back(std::move(r));
    }
    out.push_back(std::move(st));
  }
  return out;
}

std::pair<Pixel, Pixel> edge_pixels(int row, int rows, int cols) {
  int nv = cols * (rows - 1), nh = rows * (cols - 1);
  if (row < 0 || row >= nv + nh) throw std::out_of_range("edge row outside the difference matrix");
  if (row < nv) {
    int c = row / (rows - 1), r = row % (rows - 1);
    return {{r, c}, {r + 1, c}};
  }
  int k = row - nv;
  int c = k / rows, r = k % rows;
  return {{r, c}, {r, c + 1}};
}

EdgeSet edge_set(const Eigen::VectorXd& mu_hat, int rows, int cols, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
  SparseRowMatrix D0 = grid_difference_matrix(rows, cols);
  if (D0.cols() != mu_hat.size()) throw std::invalid_argument("vector length does not match the image shape");
  Eigen::VectorXd d = D0 * mu_hat;
  EdgeSet e;
  for (int j = 0; j < d.size(); ++j)
    if (std::abs(d(j)) > tol) {
      e.rows.push_back(j);
      e.pixels.push_back(edge_pixels(j, rows, cols));
    }
  return e;
}

GridImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  Header h = read_header(in, "P5", path);
  auto bytes = read_raw(in, static_cast<std::size_t>(h.width) * h.height, path);
  GridImage img{Eigen::MatrixXd(h.height, h.width)};
  for (int r = 0; r < h.height; ++r)
    for (int c = 0; c < h.width; ++c) img.Y(r, c) = bytes[static_cast<std::size_t>(r) * h.width + c] / double(h.maxval);
  return img;
}

void write_pgm(const std::string& path, const GridImage& img) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(img.Y.size()));
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c) bytes.push_back(to_byte(img.Y(r, c)));
  std::ostringstream hdr;
  hdr << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  write_raw(path, hdr.str(), bytes);
}

Palette default_palette() {
  return {{1, {0, 255, 0}}, {2, {0, 0, 255}}, {3, {128, 0, 128}}, {4, {255, 0, 0}}};
}

Palette read_palette(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Palette pal;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ss(line);
    int idx, r, g, b;
    if (!(ss >> idx >> r >> g >> b) || r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'index r g b'");
    pal[idx] = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
  }
  return pal;
}

void write_palette(const std::string& path, const Palette& pal) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& [idx, rgb] : pal) out << idx << ' ' << int(rgb[0]) << ' ' << int(rgb[1]) << ' ' << int(rgb[2]) << '\n';
}

void write_ppm_indexed(const std::string& path, const GridImage& indices, const Palette& pal) {
  std::vector<std::uint8_t> bytes;
  for (int r = 0; r < indices.rows(); ++r)
    for (int c = 0; c < indices.cols(); ++c) {
      double v = indices.Y(r, c);
      auto it = pal.find(static_cast<int>(std::lround(v)));
      if (it == pal.end() || std::abs(v - std::lround(v)) > 1e-9)
        throw std::invalid_argument("pixel value has no palette colour");
      bytes.insert(bytes.end(), it->second.begin(), it->second.end());
    }
  std::ostringstream hdr;
  hdr << "P6\n" << indices.cols() << ' ' << indices.rows() << "\n255\n";
  write_raw(path, hdr.str(), bytes);
}

GridImage read_ppm_indexed(const std::string& path, const Palette& pal) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  Header h = read_header(in, "P6", path);
  if (h.maxval != 255) throw std::runtime_error(path + ": indexed images need maxval 255");
  auto bytes = read_raw(in, static_cast<std::size_t>(h.width) * h.height * 3, path);
  std::map<Rgb, int> inverse;
  for (const auto& [idx, rgb] : pal) inverse.emplace(rgb, idx);
  GridImage img{Eigen::MatrixXd(h.height, h.width)};
  for (int r = 0; r < h.height; ++r)
    for (int c = 0; c < h.width; ++c) {
      std::size_t o = (static_cast<std::size_t>(r) * h.width + c) * 3;
      auto it = inverse.find({bytes[o], bytes[o + 1], bytes[o + 2]});
      if (it == inverse.end()) throw std::runtime_error(path + ": colour not in palette");
      img.Y(r, c) = it->second;
    }
  return img;
}

void write_edge_overlay(const std::string& path, const GridImage& img, const EdgeSet& edges) {
  int R = img.rows(), C = img.cols();
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(R) * C * 3);
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) {
      std::uint8_t g = to_byte(img.Y(r, c));
      std::size_t o = (static_cast<std::size_t>(r) * C + c) * 3;
      bytes[o] = bytes[o + 1] = bytes[o + 2] = g;
    }
  for (const auto& [a, b] : edges.pixels) {
    (void)b;
    if (a.r < 0 || a.r >= R || a.c < 0 || a.c >= C) throw std::out_of_range("edge pixel outside the image");
    std::size_t o = (static_cast<std::size_t>(a.r) * C + a.c) * 3;
    bytes[o] = 255;
    bytes[o + 1] = 0;
    bytes[o + 2] = 0;
  }
  std::ostringstream hdr;
  hdr << "P6\n" << C << ' ' << R << "\n255\n";
  write_raw(path, hdr.str(), bytes);
}

}  // namespace changeforge
