#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "csqpt/errors.hpp"
#include "csqpt/fock.hpp"
#include "csqpt/io.hpp"
#include "csqpt/oracles.hpp"
#include "csqpt/pipeline.hpp"
#include "csqpt/validate.hpp"
#include "test_support.hpp"

using namespace csqpt;
using csqpt::testing::random_state;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("csqpt_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("density matrix JSON round trip") {
  TempDir tmp;
  DensityMatrix rho = random_state(6, 13);
  const fs::path file = tmp.path / "state.json";
  io::write_density_matrix(file, rho);
  DensityMatrix back = io::read_density_matrix(file);
  CHECK(back.dim() == 6);
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(validate_file(file, FileKind::DensityMatrixJson).ok);
}

TEST_CASE("validate catches a non-Hermitian matrix and names the entry") {
  TempDir tmp;
  const fs::path file = tmp.path / "bad.json";
  std::ofstream(file) << R"({"dim":2,"rows":[[[1.0,0.0],[0.2,0.0]],[[0.1,0.0],[0.0,0.0]]]})";
  ValidationReport rep = validate_file(file, FileKind::DensityMatrixJson);
  CHECK_FALSE(rep.ok);
  REQUIRE_FALSE(rep.diagnostics.empty());
  CHECK(rep.diagnostics.front().find("not Hermitian") != std::string::npos);
  CHECK(rep.diagnostics.front().find("rows[1][0]") != std::string::npos);
}

TEST_CASE("validate catches trace and schema problems") {
  TempDir tmp;
  SUBCASE("bad trace") {
    std::ofstream(tmp.path / "t.json")
        << R"({"dim":2,"rows":[[[0.7,0.0],[0.0,0.0]],[[0.0,0.0],[0.2,0.0]]]})";
    ValidationReport rep = validate_file(tmp.path / "t.json", FileKind::DensityMatrixJson);
    CHECK_FALSE(rep.ok);
    CHECK(rep.diagnostics.front().find("trace") != std::string::npos);
  }
  SUBCASE("missing rows") {
    std::ofstream(tmp.path / "m.json") << R"({"dim":2})";
    CHECK_FALSE(validate_file(tmp.path / "m.json", FileKind::DensityMatrixJson).ok);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(validate_file(tmp.path / "nope.json", FileKind::DensityMatrixJson),
                    ValidationError);
  }
}

TEST_CASE("quadrature CSV round trip and diagnostics") {
  TempDir tmp;
  HomodyneDataset data;
  data.samples = {{0.0, 0.31}, {1.2, -0.77}, {2.9, 4.25}};
  const fs::path file = tmp.path / "q.csv";
  io::write_quadratures(file, data);
  HomodyneDataset back = io::read_quadratures(file, 0.9);
  CHECK(back.efficiency == 0.9);
  REQUIRE(back.samples.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back.samples[i].phase == data.samples[i].phase);
    CHECK(back.samples[i].value == data.samples[i].value);
  }
  CHECK(validate_file(file, FileKind::QuadratureCsv).ok);

  SUBCASE("non-finite value is reported with its line") {
    std::ofstream(tmp.path / "bad.csv") << "phase_rad,quadrature\n0.1,0.5\n0.2,nan\n";
    ValidationReport rep = validate_file(tmp.path / "bad.csv", FileKind::QuadratureCsv);
    CHECK_FALSE(rep.ok);
    CHECK(rep.diagnostics.front().find(":3") != std::string::npos);
  }
  SUBCASE("wrong header is rejected") {
    std::ofstream(tmp.path / "h.csv") << "theta,x\n0.1,0.5\n";
    CHECK_FALSE(validate_file(tmp.path / "h.csv", FileKind::QuadratureCsv).ok);
  }
}

TEST_CASE("superoperator JSON round trip") {
  TempDir tmp;
  Superoperator sop = theoretical_superoperator({0.66, 0.63}, 4);
  const fs::path file = tmp.path / "sop.json";
  io::write_superoperator(file, sop);
  Superoperator back = io::read_superoperator(file);
  CHECK(back.dim_in == 4);
  CHECK(back.phase_symmetric);
  for (size_t i = 0; i < sop.tensor.size(); ++i)
    CHECK(std::abs(back.tensor[i] - sop.tensor[i]) < 1e-15);
  CHECK(validate_file(file, FileKind::SuperoperatorJson).ok);

  SUBCASE("claimed phase symmetry is checked") {
    back.at(1, 0, 0, 0) = Complex(0.1, 0);
    io::write_superoperator(tmp.path / "broken.json", back);
    ValidationReport rep =
        validate_file(tmp.path / "broken.json", FileKind::SuperoperatorJson);
    CHECK_FALSE(rep.ok);
  }
}

TEST_CASE("probe manifest resolves relative paths") {
  TempDir tmp;
  DensityMatrix out0 = coherent_state(Amplitude(0, 0), 12);
  DensityMatrix out1 = coherent_state(Amplitude(0.8, 0), 12);
  io::write_density_matrix(tmp.path / "p0.json", out0);
  io::write_density_matrix(tmp.path / "p1.json", out1);
  io::write_probe_manifest(tmp.path / "probes.json",
                           {{Amplitude(0, 0), "p0.json"}, {Amplitude(1, 0), "p1.json"}});
  auto probes = io::read_probe_manifest(tmp.path / "probes.json");
  REQUIRE(probes.size() == 2);
  CHECK(probes[1].alpha == Amplitude(1, 0));
  CHECK((probes[1].output.matrix() - out1.matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(validate_file(tmp.path / "probes.json", FileKind::ProbeManifestJson).ok);
}

TEST_CASE("response fit JSON round trip") {
  TempDir tmp;
  std::vector<ProbeRecord> probes;
  for (int i = 0; i < 6; ++i) {
    const double a = 0.5 * i;
    probes.push_back({Amplitude(a, 0), coherent_state(Amplitude(a, 0), 22)});
  }
  InterpolatedResponse fit = center_and_fit(probes, 2, 1);
  const fs::path file = tmp.path / "fit.json";
  io::write_response_fit(file, fit);
  InterpolatedResponse back = io::read_response_fit(file);
  CHECK(back.dim == fit.dim);
  CHECK(back.degree == fit.degree);
  for (double a : {0.3, 1.7, 2.5}) {
    CHECK(std::abs(back.mean_at(a) - fit.mean_at(a)) < 1e-14);
    CHECK((back.centered_at(a) - fit.centered_at(a)).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK(validate_file(file, FileKind::ResponseFitJson).ok);
}

TEST_CASE("pipeline config round trip") {
  TempDir tmp;
  PipelineConfig cfg = PipelineConfig::paper_eom();
  cfg.seed = 777;
  cfg.noiseless = true;
  const fs::path file = tmp.path / "config.json";
  save_pipeline_config(file, cfg);
  PipelineConfig back = load_pipeline_config(file);
  CHECK(back.seed == 777);
  CHECK(back.noiseless);
  CHECK(back.probe_amplitudes == cfg.probe_amplitudes);
  CHECK(validate_file(file, FileKind::PipelineConfigJson).ok);

  SUBCASE("invalid configs are rejected") {
    std::ofstream(tmp.path / "bad.json") << R"({"dim": 0})";
    CHECK_FALSE(validate_file(tmp.path / "bad.json", FileKind::PipelineConfigJson).ok);
  }
}

TEST_CASE("field CSV and calibration CSV validation") {
  TempDir tmp;
  PhaseSpaceField f = wigner(fock_state(0, 4), GridSpec(6.0, 64));
  io::write_field(tmp.path / "w.csv", f);
  CHECK(validate_file(tmp.path / "w.csv", FileKind::FieldCsv).ok);

  CalibrationCurve curve;
  curve.n_values = {0, 1, 2};
  curve.parameter_values = {0.6, 1.4, 2.0};
  io::write_calibration(tmp.path / "cal.csv", curve);
  CHECK(validate_file(tmp.path / "cal.csv", FileKind::CalibrationCsv).ok);

  std::ofstream(tmp.path / "badcal.csv") << "n,value\n0,inf\n";
  CHECK_FALSE(validate_file(tmp.path / "badcal.csv", FileKind::CalibrationCsv).ok);

  CHECK_THROWS_AS(file_kind_from_string("nonsense"), ValidationError);
}

TEST_CASE("plot export") {
  TempDir tmp;
  SUBCASE("superoperator diagonal triples") {
    io::write_superoperator(tmp.path / "sop.json", theoretical_superoperator({0.66, 0.2}, 3));
    plot_export(tmp.path / "sop.json", PlotKind::SuperoperatorDiagonal,
                tmp.path / "diag.csv");
    std::ifstream in(tmp.path / "diag.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "m,k,value");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) ++rows;
    CHECK(rows == 9);
  }
  SUBCASE("wigner grid from a density matrix") {
    io::write_density_matrix(tmp.path / "st.json", fock_state(1, 5));
    PlotOptions opts;
    opts.grid = GridSpec(6.0, 64);
    plot_export(tmp.path / "st.json", PlotKind::WignerGrid, tmp.path / "w.csv", opts);
    CHECK(validate_file(tmp.path / "w.csv", FileKind::FieldCsv).ok);
  }
  SUBCASE("calibration passthrough") {
    CalibrationCurve curve;
    curve.n_values = {0, 1};
    curve.parameter_values = {0.6, 1.4};
    io::write_calibration(tmp.path / "cal.csv", curve);
    plot_export(tmp.path / "cal.csv", PlotKind::CalibrationCurve, tmp.path / "out.csv");
    CHECK(validate_file(tmp.path / "out.csv", FileKind::CalibrationCsv).ok);
  }
}
