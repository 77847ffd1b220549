#include "midpredict/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "midpredict/error.hpp"
#include "midpredict/rng.hpp"

namespace midpredict {

namespace {

constexpr std::string_view kHeader =
    "dyad_id,year,democracy,allies,contingency,distance,capability,dependency,majorpower,label";

constexpr std::size_t kColumns = 3 + kNumVariables;

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

template <class T>
bool parse_number(std::string_view text, T& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

void format_number(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

std::string record_name(const DyadRecord& r) { return r.dyad_id + "/" + std::to_string(r.year); }

}  // namespace

std::string_view variable_name(Variable v) {
    switch (v) {
        case Variable::Democracy: return "Democracy";
        case Variable::Allies: return "Allies";
        case Variable::Contingency: return "Contingency";
        case Variable::Distance: return "Distance";
        case Variable::Capability: return "Capability";
        case Variable::Dependency: return "Dependency";
        case Variable::MajorPower: return "MajorPower";
    }
    return "?";
}

std::string_view variable_column(Variable v) {
    switch (v) {
        case Variable::Democracy: return "democracy";
        case Variable::Allies: return "allies";
        case Variable::Contingency: return "contingency";
        case Variable::Distance: return "distance";
        case Variable::Capability: return "capability";
        case Variable::Dependency: return "dependency";
        case Variable::MajorPower: return "majorpower";
    }
    return "?";
}

std::string_view variable_abbrev(Variable v) {
    switch (v) {
        case Variable::Democracy: return "Dem";
        case Variable::Allies: return "Allies";
        case Variable::Contingency: return "Contig";
        case Variable::Distance: return "Dist";
        case Variable::Capability: return "Capab";
        case Variable::Dependency: return "Depnd";
        case Variable::MajorPower: return "Majpow";
    }
    return "?";
}

std::optional<Variable> parse_variable(std::string_view name) {
    auto lower = [](std::string_view s) {
        std::string out(s);
        std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
        return out;
    };
    const auto key = lower(name);
    for (auto v : kAllVariables) {
        if (key == variable_column(v) || key == lower(variable_abbrev(v))) return v;
    }
    return std::nullopt;
}

bool VariableSpec::has_bounds() const {
    return std::isfinite(canonical_min) && std::isfinite(canonical_max) && canonical_min < canonical_max;
}

SpecSet default_specs() {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {{
        {Variable::Democracy, VariableKind::BoundedContinuous, -10.0, 10.0},
        {Variable::Allies, VariableKind::Binary, 0.0, 1.0},
        {Variable::Contingency, VariableKind::Binary, 0.0, 1.0},
        {Variable::Distance, VariableKind::UnboundedContinuous, nan, nan},
        {Variable::Capability, VariableKind::UnboundedContinuous, nan, nan},
        {Variable::Dependency, VariableKind::UnboundedContinuous, nan, nan},
        {Variable::MajorPower, VariableKind::Binary, 0.0, 1.0},
    }};
}

std::string_view label_name(Label l) { return l == Label::Conflict ? "conflict" : "peace"; }

std::optional<Label> parse_label(std::string_view s) {
    if (s == "peace") return Label::Peace;
    if (s == "conflict") return Label::Conflict;
    return std::nullopt;
}

std::size_t Dataset::count(Label l) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [l](const DyadRecord& r) { return r.label == l; }));
}

void validate_record(const DyadRecord& r, const SpecSet& specs) {
    for (const auto& spec : specs) {
        const double v = r.value(spec.variable);
        auto fail = [&](const std::string& why) {
            throw ValidationError("record " + record_name(r) + ": variable " +
                                  std::string(variable_name(spec.variable)) + " " + why);
        };
        if (!std::isfinite(v)) fail("is not finite");
        switch (spec.kind) {
            case VariableKind::Binary:
                if (v != 0.0 && v != 1.0) fail("must be 0 or 1, got " + std::to_string(v));
                break;
            case VariableKind::BoundedContinuous:
                if (v < spec.canonical_min || v > spec.canonical_max) {
                    fail("out of bounds [" + std::to_string(spec.canonical_min) + ", " +
                         std::to_string(spec.canonical_max) + "], got " + std::to_string(v));
                }
                break;
            case VariableKind::UnboundedContinuous:
                break;
        }
    }
}

Dataset parse_dataset(std::istream& in, const std::string& source, const SpecSet& specs) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ValidationError(source + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw ParseError(source, line_no, "unexpected header '" + line + "'");

    Dataset ds;
    ds.specs = specs;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != kColumns) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(kColumns) + " columns, got " + std::to_string(fields.size()));
        }
        DyadRecord r;
        if (fields[0].empty()) throw ParseError(source, line_no, "empty dyad_id");
        r.dyad_id = std::string(fields[0]);
        if (!parse_number(fields[1], r.year)) {
            throw ParseError(source, line_no, "non-integer year '" + std::string(fields[1]) + "'");
        }
        for (std::size_t i = 0; i < kNumVariables; ++i) {
            if (!parse_number(fields[2 + i], r.values[i])) {
                throw ParseError(source, line_no,
                                 "non-numeric " + std::string(variable_column(kAllVariables[i])) + " '" +
                                     std::string(fields[2 + i]) + "'");
            }
        }
        const auto label = parse_label(fields[kColumns - 1]);
        if (!label) throw ParseError(source, line_no, "unknown label '" + std::string(fields[kColumns - 1]) + "'");
        r.label = *label;
        validate_record(r, specs);
        ds.records.push_back(std::move(r));
    }
    if (ds.records.empty()) throw ValidationError(source + ": dataset has no records");
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const SpecSet& specs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open dataset '" + path.string() + "'");
    return parse_dataset(in, path.string(), specs);
}

void write_dataset(const Dataset& ds, std::ostream& out) {
    std::string buf;
    buf.append(kHeader).push_back('\n');
    for (const auto& r : ds.records) {
        buf.append(r.dyad_id).push_back(',');
        buf.append(std::to_string(r.year));
        for (double v : r.values) {
            buf.push_back(',');
            format_number(buf, v);
        }
        buf.push_back(',');
        buf.append(label_name(r.label)).push_back('\n');
    }
    out << buf;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write dataset '" + path.string() + "'");
    write_dataset(ds, out);
}

SpecSet resolve_bounds(const SpecSet& specs, std::span<const DyadRecord> records) {
    SpecSet out = specs;
    for (auto& spec : out) {
        if (!spec.data_derived()) continue;
        if (records.empty()) throw ValidationError("cannot derive bounds from an empty dataset");
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& r : records) {
            lo = std::min(lo, r.value(spec.variable));
            hi = std::max(hi, r.value(spec.variable));
        }
        spec.canonical_min = lo;
        spec.canonical_max = hi;
    }
    return out;
}

Normalizer::Normalizer(const std::array<double, kNumVariables>& lo, const std::array<double, kNumVariables>& hi,
                       const std::array<bool, kNumVariables>& clamp)
    : lo_(lo), hi_(hi), clamp_(clamp) {
    for (std::size_t i = 0; i < kNumVariables; ++i) {
        if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]) || !(lo_[i] < hi_[i])) {
            throw ValidationError("degenerate range for variable " + std::string(variable_name(kAllVariables[i])) +
                                  ": [" + std::to_string(lo_[i]) + ", " + std::to_string(hi_[i]) + "]");
        }
    }
}

Normalizer Normalizer::fit(const SpecSet& specs, std::span<const DyadRecord> records) {
    const SpecSet resolved = resolve_bounds(specs, records);
    std::array<double, kNumVariables> lo{}, hi{};
    std::array<bool, kNumVariables> clamp{};
    for (const auto& spec : resolved) {
        const auto i = index_of(spec.variable);
        lo[i] = spec.canonical_min;
        hi[i] = spec.canonical_max;
        clamp[i] = spec.data_derived();
    }
    return Normalizer(lo, hi, clamp);
}

double Normalizer::apply(Variable v, double raw) const {
    const auto i = index_of(v);
    const double scaled = (raw - lo_[i]) / (hi_[i] - lo_[i]);
    return clamp_[i] ? std::clamp(scaled, 0.0, 1.0) : scaled;
}

double Normalizer::invert(Variable v, double scaled) const {
    const auto i = index_of(v);
    return lo_[i] + scaled * (hi_[i] - lo_[i]);
}

Features Normalizer::apply(const Features& raw) const {
    Features out{};
    for (auto v : kAllVariables) out[index_of(v)] = apply(v, raw[index_of(v)]);
    return out;
}

Features Normalizer::invert(const Features& scaled) const {
    Features out{};
    for (auto v : kAllVariables) out[index_of(v)] = invert(v, scaled[index_of(v)]);
    return out;
}

Dataset normalize(const Dataset& ds) {
    if (ds.normalized()) throw ValidationError("dataset is already normalized");
    return normalize(ds, Normalizer::fit(ds.specs, ds.records));
}

Dataset normalize(const Dataset& ds, const Normalizer& transform) {
    if (ds.normalized()) throw ValidationError("dataset is already normalized");
    Dataset out = ds;
    for (auto& r : out.records) r.values = transform.apply(r.values);
    out.normalizer = transform;
    return out;
}

Dataset denormalize(const Dataset& ds) {
    if (!ds.normalized()) throw ValidationError("dataset is not normalized");
    Dataset out = ds;
    for (auto& r : out.records) r.values = ds.normalizer->invert(r.values);
    out.normalizer.reset();
    return out;
}

Split balanced_sample(const Dataset& ds, std::size_t n_per_class, std::uint64_t seed) {
    std::vector<std::size_t> conflict, peace;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        (ds.records[i].label == Label::Conflict ? conflict : peace).push_back(i);
    }
    if (conflict.size() < n_per_class || peace.size() < n_per_class) {
        throw ValidationError("balanced sample of " + std::to_string(n_per_class) +
                              " per class needs more records: available conflict=" + std::to_string(conflict.size()) +
                              ", peace=" + std::to_string(peace.size()));
    }

    CounterRng rng(seed, streams::balanced_sample);
    std::vector<bool> chosen(ds.records.size(), false);
    for (auto* pool : {&conflict, &peace}) {
        // Partial Fisher-Yates: the first n_per_class slots are a uniform draw.
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const auto j = i + rng.index(pool->size() - i);
            std::swap((*pool)[i], (*pool)[j]);
            chosen[(*pool)[i]] = true;
        }
    }

    Split split;
    split.train.specs = split.test.specs = ds.specs;
    split.train.normalizer = split.test.normalizer = ds.normalizer;
    split.train.records.reserve(2 * n_per_class);
    split.test.records.reserve(ds.records.size() - 2 * n_per_class);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        (chosen[i] ? split.train : split.test).records.push_back(ds.records[i]);
    }
    return split;
}

double synthetic_conflict_direction(Variable v) {
    switch (v) {
        case Variable::Democracy:
        case Variable::Allies:
        case Variable::Distance:
        case Variable::Capability:
        case Variable::Dependency:
            return -1.0;
        case Variable::Contingency:
        case Variable::MajorPower:
            return 1.0;
    }
    return 1.0;
}

Dataset generate_synthetic(std::size_t n_peace, std::size_t n_conflict, double separation, std::uint64_t seed,
                           const SyntheticOptions& options) {
    if (!(separation >= 0.0) || !std::isfinite(separation)) {
        throw ValidationError("separation must be finite and non-negative");
    }
    std::array<bool, kNumVariables> informative{};
    for (auto v : options.informative) informative[index_of(v)] = true;

    CounterRng rng(seed, streams::synthetic);
    std::vector<Label> labels(n_peace, Label::Peace);
    labels.insert(labels.end(), n_conflict, Label::Conflict);
    rng.shuffle(labels);

    // Per-variable location/scale of the class-free distribution.
    struct Shape {
        double mean;
        double sd;
        double base_rate;  // binaries only
    };
    const std::array<Shape, kNumVariables> shapes = {{
        {0.0, 2.0, 0.0},    // Democracy
        {0.0, 1.0, 0.3},    // Allies
        {0.0, 1.0, 0.6},    // Contingency
        {2.8, 0.5, 0.0},    // Distance (log10 km)
        {1.0, 0.4, 0.0},    // Capability (log10 ratio)
        {-4.5, 0.8, 0.0},   // Dependency (log of trade share)
        {0.0, 1.0, 0.4},    // MajorPower
    }};

    Dataset ds;
    ds.records.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        DyadRecord r;
        char id[32];
        std::snprintf(id, sizeof(id), "SYN-%06zu", i + 1);
        r.dyad_id = id;
        r.year = 1946 + static_cast<int>(i % 47);
        r.label = labels[i];
        const double class_sign = r.label == Label::Conflict ? 1.0 : -1.0;
        for (auto v : kAllVariables) {
            const auto k = index_of(v);
            const auto& s = shapes[k];
            const double shift =
                informative[k] ? class_sign * synthetic_conflict_direction(v) * separation / 2.0 : 0.0;
            double value = 0.0;
            switch (default_specs()[k].kind) {
                case VariableKind::Binary:
                    value = informative[k] ? (rng.normal(shift, 1.0) > 0.0 ? 1.0 : 0.0)
                                           : (rng.bernoulli(s.base_rate) ? 1.0 : 0.0);
                    break;
                case VariableKind::BoundedContinuous:
                    value = std::clamp(rng.normal(s.mean + shift * s.sd, s.sd), -10.0, 10.0);
                    break;
                case VariableKind::UnboundedContinuous:
                    value = rng.normal(s.mean + shift * s.sd, s.sd);
                    if (v == Variable::Dependency) value = std::exp(value);
                    break;
            }
            r.values[k] = value;
        }
        ds.records.push_back(std::move(r));
    }
    return ds;
}

Samples to_samples(const Dataset& ds) {
    Samples s;
    s.x.reserve(ds.size());
    s.y.reserve(ds.size());
    for (const auto& r : ds.records) {
        s.x.emplace_back(r.values.begin(), r.values.end());
        s.y.push_back(r.label);
    }
    return s;
}

Samples select_columns(const Samples& s, std::span<const std::size_t> columns) {
    Samples out;
    out.y = s.y;
    out.x.reserve(s.size());
    for (const auto& row : s.x) {
        std::vector<double> projected;
        projected.reserve(columns.size());
        for (auto c : columns) {
            if (c >= row.size()) throw DimensionError("column index out of range");
            projected.push_back(row[c]);
        }
        out.x.push_back(std::move(projected));
    }
    return out;
}

Samples subset(const Samples& s, std::span<const std::size_t> rows) {
    Samples out;
    out.x.reserve(rows.size());
    out.y.reserve(rows.size());
    for (auto i : rows) {
        out.x.push_back(s.x.at(i));
        out.y.push_back(s.y.at(i));
    }
    return out;
}

}  // namespace midpredict
