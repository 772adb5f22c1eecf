#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "specres/lab.hpp"

namespace specres::report {

using json = nlohmann::ordered_json;

json complex_json(Complex z);
json to_json(const Rectangle& r);
json to_json(const BandStructure& bs);
json to_json(const EdgeClassification& c);
json to_json(const SpacingReport& r);
json to_json(const DecayReport& r);
json to_json(const ZeroCertificate& c);
json to_json(const FreeRegionCertificate& c);
json to_json(const ResonanceRecord& r);
json to_json(const FindReport& r);
json to_json(const DichotomyReport& r);
json to_json(const EdgeVerifyReport& r);
json to_json(const ScalingReport& r);
json to_json(const ClassificationReport& r);

void write_text(const std::filesystem::path& path, const std::string& text);

std::string bands_csv(const BandStructure& bs);
std::string spectrum_csv(const SpectralData& sd);
std::string resonance_csv(const std::vector<ResonanceRecord>& records);
std::string contour_csv(const ContourImage& img);
std::string scaling_csv(const ScalingReport& rep);

/// Discriminant graph with the +-2 guides and band overlays.
std::string delta_plot_svg(const PeriodicPotential& V, const BandStructure& bs,
                           int samples = 800);

/// Rescaled-plane layout of the searched and certified-free rectangles for
/// one edge, with located resonances marked.
std::string regions_svg(const FindReport& rep, const LabParams& params);

/// Image curve with the forcing-point marker.
std::string image_curve_svg(const ContourImage& img, Complex marker);

}  // namespace specres::report
