#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace modacv {

/// An amplitude-modulated series: the observed values are y_i = c_i * x_i
/// where x is the latent series and c_i in [0, 1] is the observation weight
/// (0 = fully censored, 1 = fully observed).  Invariant: y_i == 0 wherever
/// c_i == 0, since a censored point carries no value.
class ModulatedSeries {
public:
    ModulatedSeries(std::vector<double> y, std::vector<double> c);

    [[nodiscard]] std::size_t size() const noexcept { return y_.size(); }
    [[nodiscard]] std::span<const double> y() const noexcept { return y_; }
    [[nodiscard]] std::span<const double> c() const noexcept { return c_; }

    /// Share of points with a strictly positive weight.
    [[nodiscard]] double observed_fraction() const noexcept;

private:
    std::vector<double> y_;
    std::vector<double> c_;
};

/// Applies a weight sequence to a latent series: y_i = c_i * x_i.
[[nodiscard]] ModulatedSeries modulate(std::span<const double> x, std::span<const double> c);

/// A latent series together with its weights, before modulation.  Produced by
/// the simulators so tests can compare against the unobserved truth.
struct LatentPair {
    std::vector<double> x;
    std::vector<double> c;

    [[nodiscard]] ModulatedSeries modulated() const { return modulate(x, c); }
};

/// Reads a two-column CSV of (y, c) rows.  A single-column file is treated as
/// fully observed (c = 1).  An optional first line "y,c" or "y" is skipped.
/// Empty or "nan" y cells denote censored points and map to (0, 0) regardless
/// of the weight cell.  Weights outside [0, 1] and unparseable cells are
/// reported with their line number.
[[nodiscard]] ModulatedSeries read_series_csv(const std::string& path);

/// Writes "y,c" rows with enough digits that read_series_csv restores the
/// exact same doubles.
void write_series_csv(const std::string& path, const ModulatedSeries& series);
void write_series_csv(std::ostream& out, const ModulatedSeries& series);

}  // namespace modacv
