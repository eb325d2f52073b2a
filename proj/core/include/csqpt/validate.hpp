#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "csqpt/phasespace.hpp"

namespace csqpt {

enum class FileKind {
  DensityMatrixJson,
  SuperoperatorJson,
  QuadratureCsv,
  ProbeManifestJson,
  ResponseFitJson,
  FieldCsv,
  CalibrationCsv,
  PipelineConfigJson,
};

FileKind file_kind_from_string(const std::string& name);
std::string to_string(FileKind kind);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> diagnostics;

  void fail(std::string msg) {
    ok = false;
    diagnostics.push_back(std::move(msg));
  }
};

// Schema plus the kind's numerical invariants (Hermiticity, trace, finiteness,
// ...). Never modifies the file.
ValidationReport validate_file(const std::filesystem::path& path, FileKind kind);

enum class PlotKind {
  WignerGrid,        // density matrix JSON → Wigner field CSV
  PfuncGrid,         // density matrix JSON → regularized-P field CSV
  SuperoperatorDiagonal,  // superoperator JSON → m,k,value CSV
  CalibrationCurve,  // calibration CSV → n,value CSV (validated passthrough)
};

PlotKind plot_kind_from_string(const std::string& name);

struct PlotOptions {
  GridSpec grid;
  double L = 5.2;  // PfuncGrid only
};

void plot_export(const std::filesystem::path& artifact, PlotKind kind,
                 const std::filesystem::path& out, const PlotOptions& opts = {});

}  // namespace csqpt
