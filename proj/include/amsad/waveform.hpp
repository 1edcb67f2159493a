#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace amsad {

/// Uniformly sampled real-valued signal (volts) with a fixed sample period.
class Waveform {
public:
    Waveform() = default;

    /// Throws Error(input) on empty or non-finite samples and
    /// Error(config) on a non-positive sample period.
    Waveform(std::vector<double> samples, double sample_period, std::string name = {});

    std::span<const double> samples() const noexcept { return samples_; }
    std::vector<double>& mutable_samples() noexcept { return samples_; }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }

    std::size_t size() const noexcept { return samples_.size(); }
    double sample_period() const noexcept { return sample_period_; }
    double duration() const noexcept { return sample_period_ * static_cast<double>(samples_.size()); }
    double time_at(std::size_t i) const noexcept { return sample_period_ * static_cast<double>(i); }

    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    double max_value() const;
    double max_abs() const;

    /// Same sample period and name, new samples (validated).
    Waveform with_samples(std::vector<double> samples) const;

    friend bool operator==(const Waveform&, const Waveform&) = default;

private:
    std::vector<double> samples_;
    double sample_period_ = 1.0;
    std::string name_;
};

/// CSV with header `t,value`, one row per sample, values round-trip exactly.
void write_waveform_csv(const Waveform& w, const std::filesystem::path& path);
Waveform read_waveform_csv(const std::filesystem::path& path);

/// Deterministic child seed from a parent seed and a stream index (splitmix64).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

}  // namespace amsad
