#include "kmpe/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kmpe/errors.hpp"
#include "kmpe/rng.hpp"

namespace kmpe {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t row) {
    std::string_view f = trim(field);
    if (!f.empty() && f.front() == '+') f.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
        throw ParseError("non-numeric field '" + std::string(trim(field)) + "'", row);
    }
    if (!std::isfinite(value)) throw ParseError("non-finite value '" + std::string(f) + "'", row);
    return value;
}

struct ParsedRow {
    std::size_t line;
    std::vector<double> values;
};

std::vector<ParsedRow> parse_rows(std::string_view text) {
    std::vector<ParsedRow> rows;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (!text.empty()) {
        ++line_no;
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (trim(line).empty()) continue;

        ParsedRow row{line_no, {}};
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            row.values.push_back(parse_number(line.substr(start, comma - start), line_no));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (rows.empty()) {
            width = row.values.size();
        } else if (row.values.size() != width) {
            throw ParseError("ragged row: expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(row.values.size()),
                             line_no);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no data rows", 0);
    return rows;
}

}  // namespace

std::size_t LabeledDataset::positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
}

SampleSet parse_samples_csv(std::string_view text) {
    const auto rows = parse_rows(text);
    SampleSet out(rows.size(), rows.front().values.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t d = 0; d < rows[i].values.size(); ++d) {
            out.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i].values[d];
        }
    }
    return out;
}

LabeledDataset parse_labeled_csv(std::string_view text) {
    const auto rows = parse_rows(text);
    const std::size_t width = rows.front().values.size();
    if (width < 2) throw ParseError("labeled rows need at least one feature and a label", rows.front().line);
    LabeledDataset out{SampleSet(rows.size(), width - 1), std::vector<bool>(rows.size())};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t d = 0; d + 1 < width; ++d) {
            out.points.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i].values[d];
        }
        const double label = rows[i].values.back();
        if (label == 1.0) {
            out.labels[i] = true;
        } else if (label == 0.0 || label == -1.0) {
            out.labels[i] = false;
        } else {
            throw ParseError("label must be one of 0, 1, -1, +1", rows[i].line);
        }
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SampleSet load_samples_csv(const std::filesystem::path& path) {
    try {
        return parse_samples_csv(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.row());
    }
}

LabeledDataset load_labeled_csv(const std::filesystem::path& path) {
    try {
        return parse_labeled_csv(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.row());
    }
}

std::string format_samples_csv(const SampleSet& samples) {
    std::string out;
    std::array<char, 64> buf{};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t d = 0; d < samples.dim(); ++d) {
            if (d > 0) out.push_back(',');
            const double v = samples.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
            const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
            out.append(buf.data(), ptr);
        }
        out.push_back('\n');
    }
    return out;
}

MpeInstance construct_instance(const LabeledDataset& data, const InstanceSpec& spec) {
    if (data.labels.size() != data.points.size()) throw InputError("labels and points are misaligned");
    if (!(spec.positive_fraction > 0.0 && spec.positive_fraction < 1.0)) {
        throw InputError("positive_fraction must lie in (0, 1)");
    }
    if (spec.total_samples < 2) throw InputError("total_samples must be at least 2");

    std::vector<std::size_t> positives;
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        (data.labels[i] != spec.flip ? positives : negatives).push_back(i);
    }
    if (positives.empty() || negatives.empty()) throw InputError("dataset needs points of both labels");

    const auto component_count =
        static_cast<std::size_t>(std::llround(spec.positive_fraction * static_cast<double>(positives.size())));
    if (component_count == 0) throw InputError("positive_fraction selects no positives for the component pool");

    Rng rng(spec.seed);
    std::vector<std::size_t> chosen = rng.sample_without_replacement(component_count, positives.size());
    std::sort(chosen.begin(), chosen.end());

    std::vector<std::size_t> component_pool;
    std::vector<bool> in_component(positives.size(), false);
    for (std::size_t c : chosen) {
        in_component[c] = true;
        component_pool.push_back(positives[c]);
    }
    std::vector<std::size_t> mixture_pool;
    std::vector<bool> pool_is_positive;
    std::size_t p = 0;
    std::size_t q = 0;
    // Mixture pool in dataset order.
    while (p < positives.size() || q < negatives.size()) {
        if (p < positives.size() && in_component[p]) {
            ++p;
            continue;
        }
        const bool take_positive = q >= negatives.size() || (p < positives.size() && positives[p] < negatives[q]);
        mixture_pool.push_back(take_positive ? positives[p++] : negatives[q++]);
        pool_is_positive.push_back(take_positive);
    }

    const std::size_t mix_size = mixture_pool.size();
    const std::size_t comp_size = component_pool.size();
    const double share = static_cast<double>(mix_size) / static_cast<double>(mix_size + comp_size);
    auto n_draw = static_cast<std::size_t>(std::llround(share * static_cast<double>(spec.total_samples)));
    n_draw = std::clamp<std::size_t>(n_draw, 1, spec.total_samples - 1);
    const std::size_t m_draw = spec.total_samples - n_draw;
    if (n_draw > mix_size || m_draw > comp_size) {
        throw InputError("insufficient samples: need " + std::to_string(n_draw) + " mixture / " +
                         std::to_string(m_draw) + " component points, pools hold " +
                         std::to_string(mix_size) + " / " + std::to_string(comp_size));
    }

    const std::size_t remaining_positive = positives.size() - component_count;
    MpeInstance inst;
    inst.seed = spec.seed;
    inst.kappa_true = static_cast<double>(remaining_positive) / static_cast<double>(mix_size);
    inst.mixture = SampleSet(n_draw, data.points.dim());
    inst.component = SampleSet(m_draw, data.points.dim());

    std::size_t drawn_positive = 0;
    const auto mix_pick = rng.sample_without_replacement(n_draw, mix_size);
    for (std::size_t i = 0; i < n_draw; ++i) {
        inst.mixture.point(i) = data.points.point(mixture_pool[mix_pick[i]]);
        drawn_positive += pool_is_positive[mix_pick[i]] ? 1 : 0;
    }
    const auto comp_pick = rng.sample_without_replacement(m_draw, comp_size);
    for (std::size_t i = 0; i < m_draw; ++i) {
        inst.component.point(i) = data.points.point(component_pool[comp_pick[i]]);
    }
    inst.kappa_realized = static_cast<double>(drawn_positive) / static_cast<double>(n_draw);
    return inst;
}

MpeInstance synth_gaussian_pair(const SynthSpec& spec) {
    if (!(spec.kappa >= 0.0 && spec.kappa < 1.0)) throw InputError("synthetic kappa must lie in [0, 1)");
    if (spec.dim == 0) throw InputError("synthetic dim must be positive");
    if (!(spec.separation > 0.0) || !std::isfinite(spec.separation)) {
        throw InputError("synthetic separation must be finite and positive");
    }
    if (spec.n == 0 || spec.m == 0) throw InputError("synthetic n and m must be positive");

    Rng rng(spec.seed);
    MpeInstance inst;
    inst.seed = spec.seed;
    inst.kappa_true = spec.kappa;
    inst.mixture = SampleSet(spec.n, spec.dim);
    inst.component = SampleSet(spec.m, spec.dim);

    std::size_t from_component = 0;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const bool from_h = rng.uniform() < spec.kappa;
        from_component += from_h ? 1 : 0;
        auto row = inst.mixture.point(i);
        for (std::size_t d = 0; d < spec.dim; ++d) row[static_cast<Eigen::Index>(d)] = rng.normal();
        if (!from_h) row[0] += spec.separation;
    }
    for (std::size_t i = 0; i < spec.m; ++i) {
        auto row = inst.component.point(i);
        for (std::size_t d = 0; d < spec.dim; ++d) row[static_cast<Eigen::Index>(d)] = rng.normal();
    }
    inst.kappa_realized = static_cast<double>(from_component) / static_cast<double>(spec.n);
    return inst;
}

}  // namespace kmpe
