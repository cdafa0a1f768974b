#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hexwave/filters.hpp"

namespace hexwave {

namespace {

const char kMagic[4] = {'H', 'X', 'F', 'B'};
const std::uint32_t kVersion = 1;

nlohmann::json imat_json(const IMat2& m) { return {{m.m[0][0], m.m[0][1]}, {m.m[1][0], m.m[1][1]}}; }
IMat2 imat_from(const nlohmann::json& j) {
  IMat2 m;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) m.m[i][k] = j[i][k].get<i64>();
  return m;
}

FrequencyPartition partition_for(const std::string& family, int p) {
  if (family == "hexagonal") return build_hexagonal(p);
  if (family == "hexagonal-frame") return build_hexagonal_frame();
  if (family == "dyadic") return build_dyadic(p);
  throw FilterError("container: unknown partition family " + family);
}

}  // namespace

void save_bank(const FilterBankSpec& fb, const std::string& path) {
  nlohmann::json h;
  h["kind"] = kind_name(fb.kind);
  h["grid_n"] = fb.grid_n;
  h["eps"] = fb.eps;
  h["p_smooth"] = fb.p_smooth;
  h["family"] = fb.part.family_name();
  h["p"] = fb.part.p;
  h["lattice"] = to_json(fb.part.base);
  h["parent"] = imat_json(fb.parent);
  for (auto& s : fb.sub) h["sublattices"].push_back(imat_json(s));
  h["cut_band"] = fb.cut_band;
  h["cut_stage"] = fb.cut_stage;
  std::string hs = h.dump();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&kVersion), 4);
  std::uint64_t len = hs.size();
  os.write(reinterpret_cast<const char*>(&len), 8);
  os.write(hs.data(), std::streamsize(hs.size()));
  std::uint32_t K = fb.filters.size();
  os.write(reinterpret_cast<const char*>(&K), 4);
  for (auto& f : fb.filters) {
    std::int64_t e[2] = {f.eta[0], f.eta[1]};
    os.write(reinterpret_cast<const char*>(e), 16);
    os.write(reinterpret_cast<const char*>(f.modulus.data()), std::streamsize(f.modulus.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

FilterBankSpec load_bank(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  char mg[4];
  std::uint32_t ver = 0;
  is.read(mg, 4);
  is.read(reinterpret_cast<char*>(&ver), 4);
  if (!is || std::memcmp(mg, kMagic, 4) != 0 || ver != kVersion) throw std::runtime_error("not a filter container: " + path);
  std::uint64_t len = 0;
  is.read(reinterpret_cast<char*>(&len), 8);
  if (!is || len > (1u << 24)) throw std::runtime_error("corrupt container header");
  std::string hs(len, '\0');
  is.read(hs.data(), std::streamsize(len));
  auto h = nlohmann::json::parse(hs);
  FilterBankSpec fb;
  fb.kind = kind_from_name(h["kind"]);
  fb.grid_n = h["grid_n"];
  fb.eps = h["eps"];
  fb.p_smooth = h["p_smooth"];
  fb.part = partition_for(h["family"], h["p"]);
  fb.parent = imat_from(h["parent"]);
  for (auto& s : h["sublattices"]) fb.sub.push_back(imat_from(s));
  fb.cut_band = h.value("cut_band", 0);
  fb.cut_stage = h.value("cut_stage", 0);
  std::uint32_t K = 0;
  is.read(reinterpret_cast<char*>(&K), 4);
  if (!is || K != fb.sub.size()) throw std::runtime_error("corrupt container body");
  std::size_t n2 = std::size_t(fb.grid_n) * fb.grid_n;
  for (std::uint32_t k = 0; k < K; ++k) {
    TransferGrid t;
    t.k = int(k);
    t.n = fb.grid_n;
    std::int64_t e[2];
    is.read(reinterpret_cast<char*>(e), 16);
    t.eta = {e[0], e[1]};
    t.modulus.resize(n2);
    is.read(reinterpret_cast<char*>(t.modulus.data()), std::streamsize(n2 * sizeof(double)));
    if (!is) throw std::runtime_error("truncated container: " + path);
    fb.eta.push_back(t.eta);
    fb.filters.push_back(std::move(t));
  }
  for (auto& f : fb.filters) f.eta_xi = fb.eta_xi(f.k);
  return fb;
}

void write_png_gray(const std::string& path, const std::vector<double>& v, int n1, int n2, bool symmetric) {
  double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  if (symmetric) {
    double m = std::max(std::abs(lo), std::abs(hi));
    lo = -m, hi = m;
  }
  write_png_range(path, v, n1, n2, lo, hi);
}

void write_png_range(const std::string& path, const std::vector<double>& v, int n1, int n2, double lo_in, double hi_in) {
  const double lo = lo_in, hi = hi_in > lo_in ? hi_in : lo_in + 1;
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("png write failed: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, n2, n1, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      double t = (v[std::size_t(i) * n2 + j] - lo) / (hi - lo);
      row[j] = png_byte(std::lround(std::clamp(t, 0.0, 1.0) * 255));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

std::vector<std::string> write_heatmaps(const FilterBankSpec& fb, const std::string& prefix) {
  // cartesian window [-pi, pi]^2, nearest stored sample of the folded frequency
  const int n = fb.grid_n, W = 256;
  std::vector<std::string> files;
  for (int k = 0; k < fb.size(); ++k) {
    std::vector<double> img(std::size_t(W) * W);
    for (int i = 0; i < W; ++i)
      for (int j = 0; j < W; ++j) {
        Vec2 xi{-M_PI + 2 * M_PI * (j + 0.5) / W, M_PI - 2 * M_PI * (i + 0.5) / W};
        Vec2 c = fb.part.cell.to_c(xi);
        long u = wrap(std::lround(c[0] * n), n), v = wrap(std::lround(c[1] * n), n);
        img[std::size_t(i) * W + j] = fb.filters[k].modulus[std::size_t(u) * n + v];
      }
    std::string f = prefix + "_M" + std::to_string(k) + ".png";
    write_png_range(f, img, W, W, 0.0, 1.0);  // fixed range so panels compare
    files.push_back(f);
  }
  return files;
}

std::vector<std::vector<double>> render_basis_functions(const FilterBankSpec& fb, int levels, int out_n) {
  if (levels < 1) throw FilterError("render: levels must be >= 1");
  if (out_n < 8) throw FilterError("render: out_n too small");
  const int K = fb.size();
  const i64 P = i64(1) << levels;
  // frequency samples c = P*(u/out_n, v/out_n) cover one period of the truncated product
  std::vector<std::vector<cplx>> spec(K, std::vector<cplx>(std::size_t(out_n) * out_n));
  // m_k at c / 2^p lives on the grid of size out_n * 2^p / P
  auto resp = [&](int k, int p) {
    i64 n = out_n * (i64(1) << p) / P;
    if (n * P != out_n * (i64(1) << p)) throw FilterError("render: out_n must be divisible by 2^levels");
    return fb.response(k, int(n), int(n));
  };
  std::vector<std::vector<cplx>> m0s(levels + 1);
  for (int p = 1; p <= levels; ++p) m0s[p] = resp(0, p);
  auto at = [&](const std::vector<cplx>& r, int p, int u, int v) {
    i64 n = out_n * (i64(1) << p) / P;
    return r[std::size_t(wrap(u, n)) * n + std::size_t(wrap(v, n))];
  };
  std::vector<cplx> phi(std::size_t(out_n) * out_n);
  for (int u = 0; u < out_n; ++u)
    for (int v = 0; v < out_n; ++v) {
      cplx x = 1;
      for (int p = 1; p <= levels; ++p) x *= at(m0s[p], p, u, v);
      phi[std::size_t(u) * out_n + v] = x;
    }
  spec[0] = phi;
  for (int k = 1; k < K; ++k) {
    auto mk = resp(k, 1);
    for (int u = 0; u < out_n; ++u)
      for (int v = 0; v < out_n; ++v) {
        // phi-hat(c/2) = product over p = 2..levels+1 truncated to the levels we have
        cplx x = at(mk, 1, u, v);
        for (int p = 2; p <= levels; ++p) x *= at(m0s[p], p, u, v);
        spec[k][std::size_t(u) * out_n + v] = x;
      }
  }
  std::vector<std::vector<double>> out(K, std::vector<double>(std::size_t(out_n) * out_n));
  for (int k = 0; k < K; ++k) {
    fft2(spec[k], out_n, out_n, true);
    // centre the origin
    for (int i = 0; i < out_n; ++i)
      for (int j = 0; j < out_n; ++j)
        out[k][std::size_t(i) * out_n + j] =
            spec[k][std::size_t(wrap(i - out_n / 2, out_n)) * out_n + std::size_t(wrap(j - out_n / 2, out_n))].real();
  }
  return out;
}

}  // namespace hexwave
