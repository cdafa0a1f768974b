#include <png.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hexwave/transform.hpp"

namespace hexwave {

namespace {

const char kMagic[4] = {'H', 'X', 'P', 'Y'};
const std::uint32_t kVersion = 1;

nlohmann::json band_json(const BandGrid& b) {
  return {{"level", b.level},
          {"band", b.band},
          {"child", b.child},
          {"lattice", {b.lattice.m[0][0], b.lattice.m[1][0], b.lattice.m[1][1]}},
          {"rows", b.rows},
          {"cols", b.cols}};
}

BandGrid band_from(const nlohmann::json& j) {
  BandGrid b;
  b.level = j.at("level");
  b.band = j.at("band");
  b.child = j.at("child");
  auto l = j.at("lattice");
  b.lattice.m[0][0] = l.at(0);
  b.lattice.m[1][0] = l.at(1);
  b.lattice.m[1][1] = l.at(2);
  b.rows = j.at("rows");
  b.cols = j.at("cols");
  if (b.rows <= 0 || b.cols <= 0 || b.rows > (1 << 16) || b.cols > (1 << 16)) throw TransformError("corrupted band shape");
  return b;
}

}  // namespace

void save_pyramid(const SubbandPyramid& p, const std::string& path) {
  if (!p.fb) throw TransformError("pyramid has no filter bank");
  const auto& fb = *p.fb;
  nlohmann::json h;
  h["kind"] = kind_name(fb.kind);
  h["eps"] = fb.eps;
  h["p_smooth"] = fb.p_smooth;
  h["grid_n"] = fb.grid_n;
  h["family"] = fb.part.family_name();
  h["p"] = fb.part.p;
  h["fb_hash"] = bank_hash(fb);
  h["complex"] = true;
  h["levels"] = p.levels;
  h["n1"] = p.n1;
  h["n2"] = p.n2;
  if (p.cut) h["cut"] = {{"level", p.cut->level}, {"stage", p.cut->stage}, {"eps", p.cut->eps}, {"bands", p.cut->bands}};
  for (auto& b : p.bands) h["bands"].push_back(band_json(b));
  h["scaling"] = band_json(p.scaling);
  std::string hs = h.dump();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&kVersion), 4);
  std::uint64_t len = hs.size();
  os.write(reinterpret_cast<const char*>(&len), 8);
  os.write(hs.data(), std::streamsize(len));
  auto put = [&](const BandGrid& b) {
    os.write(reinterpret_cast<const char*>(b.data.data()), std::streamsize(b.data.size() * sizeof(cplx)));
  };
  for (auto& b : p.bands) put(b);
  put(p.scaling);
  if (!os) throw std::runtime_error("write failed: " + path);
}

SubbandPyramid load_pyramid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  char mg[4];
  std::uint32_t ver = 0;
  std::uint64_t len = 0;
  is.read(mg, 4);
  is.read(reinterpret_cast<char*>(&ver), 4);
  is.read(reinterpret_cast<char*>(&len), 8);
  if (!is || std::memcmp(mg, kMagic, 4) != 0 || ver != kVersion || len > (1u << 26))
    throw std::runtime_error("not a pyramid container: " + path);
  std::string hs(len, '\0');
  is.read(hs.data(), std::streamsize(len));
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception&) {
    throw TransformError("corrupted pyramid header");
  }
  if (h.at("family") != "hexagonal" && h.at("family") != "hexagonal-frame")
    throw TransformError("pyramid bank family not supported");
  auto kind = kind_from_name(h.at("kind"));
  auto fb = std::make_shared<FilterBankSpec>(make_bank(kind, h.at("eps"), h.at("p_smooth"), h.at("grid_n")));
  if (bank_hash(*fb) != h.at("fb_hash")) throw TransformError("corrupted metadata: filter bank hash mismatch");
  SubbandPyramid p;
  p.fb = fb;
  p.levels = h.at("levels");
  p.n1 = h.at("n1");
  p.n2 = h.at("n2");
  if (h.contains("cut")) {
    auto& c = h["cut"];
    p.cut = std::make_shared<CutPlan>(
        make_cut_plan(*fb, c.at("stage"), c.at("eps"), c.at("bands").get<std::vector<int>>(), c.at("level")));
  }
  auto get = [&](BandGrid& b) {
    b.data.resize(std::size_t(b.rows) * b.cols);
    is.read(reinterpret_cast<char*>(b.data.data()), std::streamsize(b.data.size() * sizeof(cplx)));
    if (!is) throw std::runtime_error("truncated pyramid: " + path);
  };
  for (auto& bj : h.at("bands")) {
    p.bands.push_back(band_from(bj));
    get(p.bands.back());
  }
  p.scaling = band_from(h.at("scaling"));
  get(p.scaling);
  return p;
}

ImageGrid read_image(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  char sig[8] = {};
  is.read(sig, 8);
  is.clear();
  is.seekg(0);
  if (png_sig_cmp(reinterpret_cast<png_const_bytep>(sig), 0, 8) == 0) {
    is.close();
    png_image im;
    std::memset(&im, 0, sizeof im);
    im.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&im, path.c_str())) throw std::runtime_error("bad png: " + path);
    im.format = PNG_FORMAT_GRAY;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(im));
    if (!png_image_finish_read(&im, nullptr, buf.data(), 0, nullptr)) {
      png_image_free(&im);
      throw std::runtime_error("bad png: " + path);
    }
    ImageGrid g(int(im.height), int(im.width));
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] = buf[i];
    return g;
  }
  // PGM: P5 binary or P2 text, comments allowed in the header
  std::string magic;
  is >> magic;
  if (magic != "P5" && magic != "P2") throw std::runtime_error("unsupported image format: " + path);
  auto next = [&]() {
    std::string tok;
    while (is >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(is, rest);
        continue;
      }
      return std::stol(tok);
    }
    throw std::runtime_error("truncated pgm header: " + path);
  };
  long w = next(), hgt = next(), maxv = next();
  if (w <= 0 || hgt <= 0 || maxv <= 0 || maxv > 65535) throw std::runtime_error("bad pgm header: " + path);
  ImageGrid g{int(hgt), int(w)};
  if (magic == "P2") {
    for (auto& x : g.v) x = double(next());
    return g;
  }
  is.get();  // single whitespace after maxval
  if (maxv < 256) {
    std::vector<unsigned char> b(g.v.size());
    is.read(reinterpret_cast<char*>(b.data()), std::streamsize(b.size()));
    if (!is) throw std::runtime_error("truncated pgm: " + path);
    for (std::size_t i = 0; i < b.size(); ++i) g.v[i] = b[i];
  } else {
    std::vector<unsigned char> b(g.v.size() * 2);
    is.read(reinterpret_cast<char*>(b.data()), std::streamsize(b.size()));
    if (!is) throw std::runtime_error("truncated pgm: " + path);
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] = double(b[2 * i] * 256 + b[2 * i + 1]);
  }
  return g;
}

void write_pgm(const std::string& path, const ImageGrid& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "P5\n" << img.n2 << " " << img.n1 << "\n255\n";
  std::vector<unsigned char> b(img.v.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    double x = std::round(img.v[i]);
    b[i] = static_cast<unsigned char>(x < 0 ? 0 : (x > 255 ? 255 : x));
  }
  os.write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace hexwave
