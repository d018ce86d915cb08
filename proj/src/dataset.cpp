#include "pcgdn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "pcgdn/errors.hpp"
#include "pcgdn/resample.hpp"
#include "pcgdn/wav_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pcgdn {

namespace {

bool is_wav(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return ext == ".wav";
}

std::vector<fs::path> sorted_wavs(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && is_wav(e.path())) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

json recipe_to_json(const MixRecipe& r) {
    json placements = json::array();
    for (const auto& p : r.placements) {
        placements.push_back({{"category", category_token(p.category)},
                              {"noise_path", p.noise_path},
                              {"noise_offset", p.noise_offset},
                              {"length", p.length},
                              {"offset", p.offset}});
    }
    json cats = json::array();
    for (const auto c : r.categories) cats.push_back(category_token(c));
    return {{"clean_id", r.clean_id},
            {"variant_index", r.variant_index},
            {"rng_seed", r.rng_seed},
            {"categories", cats},
            {"placements", placements}};
}

NoiseCategory category_from_token(const std::string& tok) {
    const auto c = parse_category(tok);
    if (!c) throw FormatError("unknown noise category token: " + tok);
    return *c;
}

MixRecipe recipe_from_json(const json& j) {
    MixRecipe r;
    r.clean_id = j.at("clean_id").get<std::string>();
    r.variant_index = j.at("variant_index").get<int>();
    r.rng_seed = j.at("rng_seed").get<uint64_t>();
    for (const auto& c : j.at("categories")) r.categories.push_back(category_from_token(c));
    for (const auto& p : j.at("placements")) {
        MixPlacement mp;
        mp.category = category_from_token(p.at("category").get<std::string>());
        mp.noise_path = p.at("noise_path").get<std::string>();
        mp.noise_offset = p.at("noise_offset").get<int64_t>();
        mp.length = p.at("length").get<int64_t>();
        mp.offset = p.at("offset").get<int64_t>();
        r.placements.push_back(std::move(mp));
    }
    return r;
}

} // namespace

std::vector<CleanRecording> load_clean_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IoError("clean corpus directory not found: " + dir);
    std::vector<CleanRecording> out;
    for (const auto& p : sorted_wavs(dir)) {
        CleanRecording rec;
        rec.id = p.stem().string();
        rec.path = p.string();
        Waveform w = read_wav(p.string());
        if (w.empty()) throw FormatError("empty clean recording: " + p.string());
        if (w.sample_rate_hz != kMixRateHz) w = resample(w, kMixRateHz);
        rec.wave = normalize(std::move(w));
        out.push_back(std::move(rec));
    }
    if (out.empty()) throw ConfigError("no WAV files in clean corpus directory: " + dir);
    return out;
}

NoiseCorpus load_noise_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IoError("noise corpus directory not found: " + dir);
    NoiseCorpus corpus;

    auto add_file = [&](const fs::path& p, NoiseCategory cat) {
        Waveform w = read_wav(p.string());
        if (w.empty()) throw FormatError("empty noise recording: " + p.string());
        if (w.sample_rate_hz != kMixRateHz) w = resample(w, kMixRateHz);
        corpus[cat].push_back({p.string(), std::move(w)});
    };

    const fs::path labels = fs::path(dir) / "labels.csv";
    if (fs::exists(labels)) {
        std::ifstream f(labels);
        if (!f) throw IoError("cannot open " + labels.string());
        std::string line;
        bool first = true;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw FormatError("bad labels.csv line: " + line);
            const std::string file = line.substr(0, comma);
            const std::string label = line.substr(comma + 1);
            if (first && (file == "file" || file == "filename")) {
                first = false;
                continue; // header row
            }
            first = false;
            const auto cat = parse_category(label);
            if (!cat) throw ConfigError("unknown noise label '" + label + "' in labels.csv");
            add_file(fs::path(dir) / file, *cat);
        }
    } else {
        for (const auto& e : fs::directory_iterator(dir)) {
            if (!e.is_directory()) continue;
            const auto cat = parse_category(e.path().filename().string());
            if (!cat)
                throw ConfigError("unknown noise category directory: " +
                                  e.path().filename().string());
            for (const auto& p : sorted_wavs(e.path())) add_file(p, *cat);
        }
    }

    for (const auto c : all_noise_categories())
        if (corpus.find(c) == corpus.end() || corpus.at(c).empty())
            throw ConfigError("noise corpus has no recordings for category '" +
                              category_token(c) + "'");
    return corpus;
}

DatasetManifest synthesize_dataset(const std::vector<CleanRecording>& clean,
                                   const NoiseCorpus& noise, const std::string& out_dir,
                                   const SynthesisOptions& opts) {
    if (clean.empty()) throw ConfigError("synthesize_dataset: empty clean corpus");
    if (opts.variants_per_clean < 1)
        throw ConfigError("synthesize_dataset: variants_per_clean must be >= 1");
    for (const auto c : all_noise_categories())
        if (noise.find(c) == noise.end() || noise.at(c).empty())
            throw ConfigError("synthesize_dataset: missing noise category '" + category_token(c) +
                              "'");
    fs::create_directories(out_dir);

    DatasetManifest manifest;
    manifest.master_seed = opts.master_seed;

    for (const auto& rec : clean) {
        const int64_t len = static_cast<int64_t>(rec.wave.samples.size());
        const double dur_s = rec.wave.duration_s();
        for (int v = 0; v < opts.variants_per_clean; ++v) {
            const uint64_t seed = derive_seed(opts.master_seed, rec.id, static_cast<uint64_t>(v));
            Rng rng(seed);

            MixRecipe recipe;
            recipe.clean_id = rec.id;
            recipe.variant_index = v;
            recipe.rng_seed = seed;

            // Category subset: each of the five included with p = 0.5; at
            // least one always.
            for (const auto c : all_noise_categories())
                if (rng.bernoulli(0.5)) recipe.categories.push_back(c);
            if (recipe.categories.empty())
                recipe.categories.push_back(
                    all_noise_categories()[rng.uniform_index(kNumNoiseCategories)]);

            std::vector<std::vector<double>> noise_vectors;
            for (const auto cat : recipe.categories) {
                const auto& files = noise.at(cat);
                const int64_t count =
                    std::max<int64_t>(1, rng.poisson(0.5 * dur_s * opts.density_scale));
                std::vector<NoiseSegment> segments;
                std::vector<size_t> file_of_segment;
                for (int64_t s = 0; s < count; ++s) {
                    const size_t fi = rng.uniform_index(files.size());
                    auto segs = extract_segments(files[fi].wave, cat, 1, rng,
                                                 std::min(kMaxSegmentS, dur_s));
                    segments.push_back(std::move(segs[0]));
                    file_of_segment.push_back(fi);
                }
                std::vector<int64_t> offsets;
                noise_vectors.push_back(build_noise_vector(segments, len, rng, &offsets));
                for (size_t s = 0; s < segments.size(); ++s) {
                    MixPlacement p;
                    p.category = cat;
                    p.noise_path = files[file_of_segment[s]].path;
                    p.noise_offset = segments[s].source_offset;
                    p.length = static_cast<int64_t>(segments[s].samples.size());
                    p.offset = offsets[s];
                    recipe.placements.push_back(std::move(p));
                }
            }

            const Waveform noisy = mix(rec.wave, noise_vectors);
            const std::string name = rec.id + "_v" + std::to_string(v) + ".wav";
            write_wav(noisy, (fs::path(out_dir) / name).string());

            ManifestEntry entry;
            entry.noisy_path = name;
            entry.clean_path = rec.path;
            entry.subject_id = rec.id;
            entry.recipe = std::move(recipe);
            manifest.entries.push_back(std::move(entry));
        }
    }
    return manifest;
}

Waveform replay_recipe(const MixRecipe& recipe, const Waveform& clean, const NoiseCorpus& noise) {
    if (clean.sample_rate_hz != kMixRateHz) throw DomainError("replay_recipe: clean must be 4 kHz");
    const int64_t len = static_cast<int64_t>(clean.samples.size());

    auto find_noise = [&](const std::string& path) -> const Waveform& {
        for (const auto& [cat, files] : noise)
            for (const auto& f : files)
                if (f.path == path) return f.wave;
        throw IoError("replay_recipe: noise file not in corpus: " + path);
    };

    std::vector<std::vector<double>> noise_vectors;
    for (const auto cat : recipe.categories) {
        std::vector<double> v(static_cast<size_t>(len), 0.0);
        for (const auto& p : recipe.placements) {
            if (p.category != cat) continue;
            const Waveform& src = find_noise(p.noise_path);
            for (int64_t i = 0; i < p.length; ++i)
                v[static_cast<size_t>(p.offset + i)] +=
                    src.samples[static_cast<size_t>(p.noise_offset + i)];
        }
        normalize_in_place(v);
        noise_vectors.push_back(std::move(v));
    }
    return mix(clean, noise_vectors);
}

DatasetManifest split_dataset(const DatasetManifest& manifest, std::array<double, 3> ratios,
                              Rng& rng) {
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw DomainError("split_dataset: ratios must sum to 1");

    // Subjects in first-appearance order, then shuffled.
    std::vector<std::string> subjects;
    std::set<std::string> seen;
    for (const auto& e : manifest.entries)
        if (seen.insert(e.subject_id).second) subjects.push_back(e.subject_id);
    const int n = static_cast<int>(subjects.size());
    if (n < 3) throw DomainError("split_dataset: need at least 3 subjects for 3 partitions");
    rng.shuffle(subjects);

    // Largest-remainder rounding at subject granularity.
    std::array<int, 3> quota{};
    std::array<double, 3> frac{};
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double q = ratios[static_cast<size_t>(i)] * n;
        quota[static_cast<size_t>(i)] = static_cast<int>(q);
        frac[static_cast<size_t>(i)] = q - quota[static_cast<size_t>(i)];
        assigned += quota[static_cast<size_t>(i)];
    }
    while (assigned < n) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (frac[static_cast<size_t>(i)] > frac[static_cast<size_t>(best)]) best = i;
        ++quota[static_cast<size_t>(best)];
        frac[static_cast<size_t>(best)] = -1.0;
        ++assigned;
    }
    // Every partition must be usable downstream.
    for (int i = 0; i < 3; ++i) {
        if (quota[static_cast<size_t>(i)] > 0) continue;
        int donor = 0;
        for (int j = 1; j < 3; ++j)
            if (quota[static_cast<size_t>(j)] > quota[static_cast<size_t>(donor)]) donor = j;
        --quota[static_cast<size_t>(donor)];
        ++quota[static_cast<size_t>(i)];
    }

    std::map<std::string, std::string> partition_of;
    int idx = 0;
    const std::array<std::string, 3> names{"train", "val", "test"};
    for (int part = 0; part < 3; ++part)
        for (int k = 0; k < quota[static_cast<size_t>(part)]; ++k)
            partition_of[subjects[static_cast<size_t>(idx++)]] = names[static_cast<size_t>(part)];

    DatasetManifest out = manifest;
    out.ratios = ratios;
    for (auto& e : out.entries) e.partition = partition_of.at(e.subject_id);
    return out;
}

std::map<NoiseCategory, CategoryStats> segment_stats(const DatasetManifest& manifest) {
    if (manifest.entries.empty()) throw DomainError("segment_stats: empty manifest");
    std::map<NoiseCategory, std::vector<int64_t>> lengths;
    for (const auto& e : manifest.entries)
        for (const auto& p : e.recipe.placements) lengths[p.category].push_back(p.length);

    std::map<NoiseCategory, CategoryStats> out;
    for (const auto& [cat, ls] : lengths) {
        CategoryStats st;
        st.count = static_cast<int64_t>(ls.size());
        double acc = 0.0;
        for (const int64_t l : ls) acc += static_cast<double>(l) / kMixRateHz;
        st.mean_s = acc / static_cast<double>(ls.size());
        double var = 0.0;
        for (const int64_t l : ls) {
            const double d = static_cast<double>(l) / kMixRateHz - st.mean_s;
            var += d * d;
        }
        st.std_s = std::sqrt(var / static_cast<double>(ls.size()));

        // Histogram mode on 0.01 s bins, computed in integer samples
        // (0.01 s = 40 samples at 4 kHz); ties go to the shorter bin.
        std::map<int64_t, int64_t> bins;
        for (const int64_t l : ls) ++bins[l / 40];
        int64_t best_bin = 0, best_count = -1;
        for (const auto& [bin, count] : bins)
            if (count > best_count) {
                best_bin = bin;
                best_count = count;
            }
        st.mode_s = static_cast<double>(best_bin) * 0.01;
        out[cat] = st;
    }
    return out;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    json entries = json::array();
    for (const auto& e : manifest.entries) {
        entries.push_back({{"noisy_path", e.noisy_path},
                           {"clean_path", e.clean_path},
                           {"subject_id", e.subject_id},
                           {"partition", e.partition},
                           {"recipe", recipe_to_json(e.recipe)}});
    }
    const json j = {{"tool_version", manifest.tool_version},
                    {"master_seed", manifest.master_seed},
                    {"ratios", manifest.ratios},
                    {"entries", entries}};
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write manifest: " + path);
    f << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open manifest: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw FormatError("bad manifest JSON in " + path + ": " + e.what());
    }
    DatasetManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.master_seed = j.at("master_seed").get<uint64_t>();
    const auto r = j.at("ratios");
    m.ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
    for (const auto& e : j.at("entries")) {
        ManifestEntry entry;
        entry.noisy_path = e.at("noisy_path").get<std::string>();
        entry.clean_path = e.at("clean_path").get<std::string>();
        entry.subject_id = e.at("subject_id").get<std::string>();
        entry.partition = e.at("partition").get<std::string>();
        entry.recipe = recipe_from_json(e.at("recipe"));
        m.entries.push_back(std::move(entry));
    }
    return m;
}

std::vector<ManifestEntry> partition_entries(const DatasetManifest& m, const std::string& part) {
    std::vector<ManifestEntry> out;
    for (const auto& e : m.entries)
        if (e.partition == part) out.push_back(e);
    return out;
}

} // namespace pcgdn
