#include "fbvar/storage.hpp"

#include "fbvar/error.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace fbvar {

namespace {

enum Flags : std::uint32_t {
  kFlagTv = 1u << 0,
  kFlagSv = 1u << 1,
  kFlagT = 1u << 2,
  kFlagTruncated = 1u << 3,
};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_matrix(const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) put(m(i, j));
  }
  void put_vector(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) put(v[i]);
  }
  std::vector<unsigned char>& bytes() { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

class Reader {
 public:
  Reader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > size_) throw IntegrityError("draws file truncated");
    T v;
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  Eigen::MatrixXd get_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = get<double>();
    return m;
  }
  Eigen::VectorXd get_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = get<double>();
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t record_length(const DrawLayout& l) {
  const std::size_t C = l.tv_coefs.size();
  const std::size_t n = static_cast<std::size_t>(l.n());
  std::size_t len = static_cast<std::size_t>(l.N) * l.K() + static_cast<std::size_t>(l.N) * l.r + C * l.T + C + l.m;
  len += l.features.stoch_vol ? n * l.T + n : n;
  if (l.features.student_t) len += n;
  return len + 2;
}

void write_draws(const std::string& path, const PosteriorDraws& draws) {
  const auto& l = draws.layout;
  Writer payload;
  for (const auto& d : draws.draws) {
    payload.put_matrix(d.phi);
    payload.put_matrix(d.loadings);
    payload.put_matrix(d.tv_paths);
    payload.put_vector(d.q);
    payload.put_vector(d.w);
    payload.put_matrix(d.macro_var);
    if (l.features.stoch_vol) payload.put_vector(d.omega2);
    if (l.features.student_t) payload.put_vector(d.dof);
    payload.put(d.spectral_radius);
    payload.put(d.dof_acceptance);
  }
  if (payload.bytes().size() != draws.size() * record_length(l) * sizeof(double))
    throw ValidationError("stored draws do not match their layout");

  Writer head;
  for (char c : kDrawsMagic) head.put(c);
  head.put(kDrawsVersion);
  for (int v : {l.N, l.m, l.r, l.p, l.T}) head.put(static_cast<std::uint32_t>(v));
  std::uint32_t flags = 0;
  if (l.features.tv_loadings) flags |= kFlagTv;
  if (l.features.stoch_vol) flags |= kFlagSv;
  if (l.features.student_t) flags |= kFlagT;
  if (draws.truncated) flags |= kFlagTruncated;
  head.put(flags);
  head.put(static_cast<std::uint32_t>(l.tv_coefs.size()));
  head.put(static_cast<std::uint64_t>(draws.size()));
  head.put(static_cast<std::uint64_t>(payload.bytes().size()));
  head.put(fnv1a64(payload.bytes().data(), payload.bytes().size()));
  for (const auto& [row, shock] : l.tv_coefs) {
    head.put(static_cast<std::uint32_t>(row));
    head.put(static_cast<std::uint32_t>(shock));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(head.bytes().data()), static_cast<std::streamsize>(head.bytes().size()));
  out.write(reinterpret_cast<const char*>(payload.bytes().data()),
            static_cast<std::streamsize>(payload.bytes().size()));
  if (!out) throw IoError("write failed for " + path);
}

PosteriorDraws read_draws(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("missing draws file " + path);
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(bytes.data(), bytes.size());
  for (char c : kDrawsMagic)
    if (r.get<char>() != c) throw IntegrityError(path + ": not a draws file (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kDrawsVersion) throw IntegrityError(path + ": unsupported version " + std::to_string(version));

  PosteriorDraws out;
  auto& l = out.layout;
  l.N = static_cast<int>(r.get<std::uint32_t>());
  l.m = static_cast<int>(r.get<std::uint32_t>());
  l.r = static_cast<int>(r.get<std::uint32_t>());
  l.p = static_cast<int>(r.get<std::uint32_t>());
  l.T = static_cast<int>(r.get<std::uint32_t>());
  const auto flags = r.get<std::uint32_t>();
  l.features.tv_loadings = flags & kFlagTv;
  l.features.stoch_vol = flags & kFlagSv;
  l.features.student_t = flags & kFlagT;
  out.truncated = flags & kFlagTruncated;
  const auto C = r.get<std::uint32_t>();
  const auto count = r.get<std::uint64_t>();
  const auto payload_size = r.get<std::uint64_t>();
  const auto checksum = r.get<std::uint64_t>();
  for (std::uint32_t c = 0; c < C; ++c) {
    const int row = static_cast<int>(r.get<std::uint32_t>());
    const int shock = static_cast<int>(r.get<std::uint32_t>());
    l.tv_coefs.emplace_back(row, shock);
  }
  if (l.m > l.N || l.r < 1 || l.p < 1) throw IntegrityError(path + ": inconsistent header");
  const std::size_t start = r.pos();
  if (bytes.size() - start != payload_size || payload_size != count * record_length(l) * sizeof(double))
    throw IntegrityError(path + ": payload size mismatch (file truncated or corrupt)");
  if (fnv1a64(bytes.data() + start, payload_size) != checksum) throw IntegrityError(path + ": checksum mismatch");

  const int n = l.n();
  out.draws.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    StoredDraw d;
    d.phi = r.get_matrix(l.N, l.K());
    d.loadings = r.get_matrix(l.N, l.r);
    d.tv_paths = r.get_matrix(C, l.T);
    d.q = r.get_vector(C);
    d.w = r.get_vector(l.m);
    d.macro_var = r.get_matrix(n, l.features.stoch_vol ? l.T : 1);
    if (l.features.stoch_vol) d.omega2 = r.get_vector(n);
    if (l.features.student_t) d.dof = r.get_vector(n);
    d.spectral_radius = r.get<double>();
    d.dof_acceptance = r.get<double>();
    out.draws.push_back(std::move(d));
  }
  return out;
}

void write_draws_csv(const std::string& path, const PosteriorDraws& draws) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  std::fprintf(f, "draw,param,i,j,t,value\n");
  const auto& l = draws.layout;
  for (std::size_t k = 0; k < draws.size(); ++k) {
    const auto& d = draws.draws[k];
    auto matrix = [&](const char* name, const Eigen::MatrixXd& m) {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          std::fprintf(f, "%zu,%s,%ld,%ld,,%.17g\n", k, name, static_cast<long>(i), static_cast<long>(j), m(i, j));
    };
    auto vector = [&](const char* name, const Eigen::VectorXd& v) {
      for (Eigen::Index i = 0; i < v.size(); ++i)
        std::fprintf(f, "%zu,%s,%ld,,,%.17g\n", k, name, static_cast<long>(i), v[i]);
    };
    matrix("phi", d.phi);
    matrix("loading", d.loadings);
    for (std::size_t c = 0; c < l.tv_coefs.size(); ++c)
      for (int t = 0; t < l.T; ++t)
        std::fprintf(f, "%zu,loading_path,%d,%d,%d,%.17g\n", k, l.tv_coefs[c].first, l.tv_coefs[c].second, t,
                     d.tv_paths(static_cast<Eigen::Index>(c), t));
    vector("q", d.q);
    vector("w", d.w);
    if (l.features.stoch_vol) {
      for (Eigen::Index i = 0; i < d.macro_var.rows(); ++i)
        for (Eigen::Index t = 0; t < d.macro_var.cols(); ++t)
          std::fprintf(f, "%zu,sigma2_path,%ld,,%ld,%.17g\n", k, static_cast<long>(i), static_cast<long>(t),
                       d.macro_var(i, t));
      vector("omega2", d.omega2);
    } else {
      vector("sigma2", d.macro_var.col(0));
    }
    if (l.features.student_t) vector("dof", d.dof);
    std::fprintf(f, "%zu,spectral_radius,,,,%.17g\n", k, d.spectral_radius);
  }
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

}  // namespace fbvar
