#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <complex>
#include <optional>

#include "hexwave/compress.hpp"
#include "hexwave/filters.hpp"
#include "hexwave/partition.hpp"
#include "hexwave/pr.hpp"
#include "hexwave/transform.hpp"

namespace py = pybind11;
using namespace hexwave;

namespace {

using Bank = std::shared_ptr<FilterBankSpec>;

ImageGrid to_grid(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2) throw std::invalid_argument("image must be 2-d");
  ImageGrid g(int(a.shape(0)), int(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), g.v.begin());
  return g;
}

py::array_t<double> to_array(const ImageGrid& g) {
  py::array_t<double> out({g.n1, g.n2});
  std::copy(g.v.begin(), g.v.end(), out.mutable_data());
  return out;
}

Bank bank(const std::string& kind, std::optional<double> eps, int p_smooth, int grid_n) {
  auto k = kind_from_name(kind);
  double e = eps ? *eps : (k == BankKind::Frame ? kDefaultFrameEps : kDefaultBasisEps);
  return std::make_shared<FilterBankSpec>(make_bank(k, e, p_smooth, grid_n));
}

// json -> python via the json module keeps the binding small
py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_hexwave, m) {
  py::register_exception<FilterError>(m, "FilterError", PyExc_ValueError);
  py::register_exception<TransformError>(m, "TransformError", PyExc_ValueError);
  py::register_exception<CompressError>(m, "CompressError", PyExc_ValueError);

  py::class_<FilterBankSpec, Bank>(m, "FilterBank")
      .def_property_readonly("kind", [](const FilterBankSpec& b) { return kind_name(b.kind); })
      .def_readonly("eps", &FilterBankSpec::eps)
      .def_readonly("p_smooth", &FilterBankSpec::p_smooth)
      .def_readonly("grid_n", &FilterBankSpec::grid_n)
      .def("__len__", &FilterBankSpec::size)
      .def("moduli", [](const FilterBankSpec& b) {
        std::vector<py::array_t<double>> out;
        for (auto& f : b.filters) {
          py::array_t<double> a({b.grid_n, b.grid_n});
          std::copy(f.modulus.begin(), f.modulus.end(), a.mutable_data());
          out.push_back(a);
        }
        return out;
      })
      .def("critical_ratio", [](const FilterBankSpec& b) {
        Q q = critical_ratio(b);
        return py::module_::import("fractions").attr("Fraction")(q.numerator(), q.denominator());
      })
      .def("save", [](const FilterBankSpec& b, const std::string& path) { save_bank(b, path); });

  m.def("make_bank", &bank, py::arg("kind"), py::arg("eps") = py::none(), py::arg("p_smooth") = 1, py::arg("grid_n") = 192);
  m.def("load_bank", [](const std::string& path) { return std::make_shared<FilterBankSpec>(load_bank(path)); });
  m.def("check_pr", [](const Bank& b) { return from_json(to_json(check_pr(*b))); });

  py::class_<SubbandPyramid>(m, "Pyramid")
      .def_readonly("levels", &SubbandPyramid::levels)
      .def_property_readonly("shape", [](const SubbandPyramid& p) { return py::make_tuple(p.n1, p.n2); })
      .def_property_readonly("is_cut", [](const SubbandPyramid& p) { return bool(p.cut); })
      .def("coefficient_count", &SubbandPyramid::coefficient_count)
      .def("energy", &SubbandPyramid::energy)
      .def("bands", [](const SubbandPyramid& p) {
        py::list out;
        auto put = [&](const BandGrid& b) {
          py::array_t<std::complex<double>> a({b.rows, b.cols});
          std::copy(b.data.begin(), b.data.end(), a.mutable_data());
          out.append(py::make_tuple(b.level, b.band, b.child, a));
        };
        for (auto& b : p.bands) put(b);
        put(p.scaling);
        return out;
      })
      .def("save", [](const SubbandPyramid& p, const std::string& path) { save_pyramid(p, path); });

  m.def(
      "analyze",
      [](py::array_t<double> img, const Bank& b, int levels, bool cut, int cut_level, std::optional<double> cut_eps) {
        auto p = analyze(to_grid(img), b, levels);
        if (cut)
          p = apply_cut(p, std::make_shared<CutPlan>(make_cut_plan(*b, 1, cut_eps ? *cut_eps : b->eps, {1, 2, 3, 4, 5, 6}, cut_level)));
        return p;
      },
      py::arg("image"), py::arg("bank"), py::arg("levels") = 3, py::arg("cut") = false, py::arg("cut_level") = 1,
      py::arg("cut_eps") = py::none());
  m.def("synthesize", [](const SubbandPyramid& p) { return to_array(synthesize(p)); });
  m.def("load_pyramid", &load_pyramid);
  m.def("read_image", [](const std::string& path) { return to_array(read_image(path)); });
  m.def("psnr", [](py::array_t<double> a, py::array_t<double> b) { return psnr(to_grid(a), to_grid(b)); });

  m.def(
      "compress",
      [](py::array_t<double> img, const std::string& method, double ratio, int levels, int tensor_levels) {
        BenchConfig cfg;
        cfg.ratio = ratio;
        cfg.levels = levels;
        cfg.tensor_levels = tensor_levels;
        ImageGrid rec;
        auto r = compress_image(to_grid(img), "array", method, cfg, &rec);
        py::dict d;
        d["method"] = r.method;
        d["ratio"] = r.ratio;
        d["kept"] = r.kept;
        d["psnr"] = r.psnr_db;
        d["reconstruction"] = to_array(rec);
        return d;
      },
      py::arg("image"), py::arg("method"), py::arg("ratio") = 20.0, py::arg("levels") = 3, py::arg("tensor_levels") = 5);
  m.def("known_methods", &known_methods);

  m.def("classify", [](const std::string& family, int p) {
    FrequencyPartition part = family == "hex" ? build_hexagonal(p)
                              : family == "hex-frame" ? build_hexagonal_frame()
                              : family == "dyadic" ? build_dyadic(p)
                                                   : throw std::invalid_argument("unknown family: " + family);
    auto bc = classify_boundaries(part);
    return from_json(to_json(bc, part));
  }, py::arg("family") = "hex", py::arg("p") = 2);
}
