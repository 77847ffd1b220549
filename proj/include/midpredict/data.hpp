#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace midpredict {

enum class Variable : std::uint8_t {
    Democracy,
    Allies,
    Contingency,
    Distance,
    Capability,
    Dependency,
    MajorPower,
};

inline constexpr std::size_t kNumVariables = 7;

inline constexpr std::array<Variable, kNumVariables> kAllVariables = {
    Variable::Democracy, Variable::Allies,     Variable::Contingency, Variable::Distance,
    Variable::Capability, Variable::Dependency, Variable::MajorPower,
};

constexpr std::size_t index_of(Variable v) { return static_cast<std::size_t>(v); }

std::string_view variable_name(Variable v);    // "Democracy"
std::string_view variable_column(Variable v);  // CSV header column, "democracy"
std::string_view variable_abbrev(Variable v);  // report row prefix, "Dem"
std::optional<Variable> parse_variable(std::string_view name);

enum class VariableKind { Binary, BoundedContinuous, UnboundedContinuous };

// Unbounded variables start with NaN bounds; resolve_bounds fills them from data.
struct VariableSpec {
    Variable variable;
    VariableKind kind;
    double canonical_min;
    double canonical_max;

    bool has_bounds() const;
    bool data_derived() const { return kind == VariableKind::UnboundedContinuous; }
};

using SpecSet = std::array<VariableSpec, kNumVariables>;

SpecSet default_specs();

enum class Label : std::uint8_t { Peace, Conflict };

std::string_view label_name(Label l);
std::optional<Label> parse_label(std::string_view s);

using Features = std::array<double, kNumVariables>;

struct DyadRecord {
    std::string dyad_id;
    int year = 0;
    Features values{};
    Label label = Label::Peace;

    double value(Variable v) const { return values[index_of(v)]; }
};

// Per-variable min-max transform to [0, 1]. Data-derived variables clamp
// unseen values into the unit interval; canonical ones are validated upstream.
class Normalizer {
public:
    Normalizer() = default;
    Normalizer(const std::array<double, kNumVariables>& lo, const std::array<double, kNumVariables>& hi,
               const std::array<bool, kNumVariables>& clamp);

    // Canonical bounds where the spec has them, otherwise min/max over `records`.
    static Normalizer fit(const SpecSet& specs, std::span<const DyadRecord> records);

    double apply(Variable v, double raw) const;
    double invert(Variable v, double scaled) const;
    Features apply(const Features& raw) const;
    Features invert(const Features& scaled) const;

    double lower(Variable v) const { return lo_[index_of(v)]; }
    double upper(Variable v) const { return hi_[index_of(v)]; }
    bool clamps(Variable v) const { return clamp_[index_of(v)]; }

    friend bool operator==(const Normalizer&, const Normalizer&) = default;

private:
    std::array<double, kNumVariables> lo_{};
    std::array<double, kNumVariables> hi_{};
    std::array<bool, kNumVariables> clamp_{};
};

struct Dataset {
    std::vector<DyadRecord> records;
    SpecSet specs = default_specs();
    std::optional<Normalizer> normalizer;  // set iff values are in model space

    bool normalized() const { return normalizer.has_value(); }
    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    std::size_t count(Label l) const;
};

// Throws ValidationError naming the record and the offending variable.
void validate_record(const DyadRecord& r, const SpecSet& specs);

Dataset parse_dataset(std::istream& in, const std::string& source, const SpecSet& specs = default_specs());
Dataset load_dataset(const std::filesystem::path& path, const SpecSet& specs = default_specs());
void write_dataset(const Dataset& ds, std::ostream& out);
void write_dataset(const Dataset& ds, const std::filesystem::path& path);

// Fills data-derived bounds from the records' min/max.
SpecSet resolve_bounds(const SpecSet& specs, std::span<const DyadRecord> records);

// Fits the transform on `ds` itself.
Dataset normalize(const Dataset& ds);
// Applies a transform fitted elsewhere (test data reuses training bounds).
Dataset normalize(const Dataset& ds, const Normalizer& transform);
Dataset denormalize(const Dataset& ds);

struct Split {
    Dataset train;
    Dataset test;
};

Split balanced_sample(const Dataset& ds, std::size_t n_per_class, std::uint64_t seed);

struct SyntheticOptions {
    // Variables whose class-conditional means differ; the rest are pure noise.
    std::vector<Variable> informative = {Variable::Democracy, Variable::Capability};
};

// Direction each variable moves for the conflict class in synthetic data (+1 higher, -1 lower).
double synthetic_conflict_direction(Variable v);

Dataset generate_synthetic(std::size_t n_peace, std::size_t n_conflict, double separation, std::uint64_t seed,
                           const SyntheticOptions& options = {});

// Dense design matrix view of a dataset.
struct Samples {
    std::vector<std::vector<double>> x;
    std::vector<Label> y;

    std::size_t size() const { return x.size(); }
    std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }
};

Samples to_samples(const Dataset& ds);
Samples select_columns(const Samples& s, std::span<const std::size_t> columns);
Samples subset(const Samples& s, std::span<const std::size_t> rows);

}  // namespace midpredict
