// pcgd: phonocardiogram denoising toolkit.
//
// Subcommands: synth, train, denoise, eval, stats, plot. Every run writes
// its resolved configuration (including the seed) to the output directory,
// so results are reproducible from the logged config alone.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcgdn/dataset.hpp"
#include "pcgdn/errors.hpp"
#include "pcgdn/metrics.hpp"
#include "pcgdn/models.hpp"
#include "pcgdn/nn/checkpoint.hpp"
#include "pcgdn/nn/train.hpp"
#include "pcgdn/plotting.hpp"
#include "pcgdn/resample.hpp"
#include "pcgdn/threading.hpp"
#include "pcgdn/wav_io.hpp"
#include "pcgdn/wavelet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pcgdn;

namespace {

struct GlobalOpts {
    uint64_t seed = 0;
    std::string config_path;
    std::string out_dir = "out";
    int threads = 0; // 0 = auto
    bool deterministic = false;
};

// Applies config-file values to options the command line did not set
// (flags win over the file). Top-level keys cover the global options and the
// active subcommand's; a nested object named after the subcommand scopes
// values to it.
void merge_config(CLI::App& app, CLI::App& cmd, const std::string& config_path) {
    if (config_path.empty()) return;
    std::ifstream f(config_path);
    if (!f) throw IoError("cannot open config file: " + config_path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad config JSON: " + std::string(e.what()));
    }
    auto apply = [](CLI::App& target, const json& section) {
        for (const auto& [key, value] : section.items()) {
            if (value.is_object()) continue;
            CLI::Option* opt = target.get_option_no_throw("--" + key);
            if (!opt || opt->count() > 0) continue; // unknown key or flag given
            opt->clear();
            if (value.is_array()) {
                for (const auto& v : value)
                    opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
            } else {
                opt->add_result(value.is_string() ? value.get<std::string>() : value.dump());
            }
            opt->run_callback();
        }
    };
    apply(app, j);
    apply(cmd, j);
    if (j.contains(cmd.get_name()) && j.at(cmd.get_name()).is_object())
        apply(cmd, j.at(cmd.get_name()));
}

void log_run_config(const GlobalOpts& g, const std::string& subcommand, const json& params) {
    fs::create_directories(g.out_dir);
    json j = {{"tool_version", kToolVersion},
              {"subcommand", subcommand},
              {"seed", g.seed},
              {"threads", num_threads()},
              {"deterministic", g.deterministic},
              {"out", g.out_dir},
              {"params", params}};
    std::ofstream f(fs::path(g.out_dir) / "run_config.json", std::ios::trunc);
    f << j.dump(2) << "\n";
}

void setup_threads(const GlobalOpts& g) {
    if (g.deterministic) {
        set_num_threads(1);
    } else {
        set_num_threads(g.threads);
    }
}

std::vector<nn::Tensor> packed_frames(const Waveform& w4k) {
    const Waveform down = resample(w4k, kModelRateHz);
    std::vector<nn::Tensor> out;
    for (const Frame& f : frame_signal(down)) out.push_back(pack(stft(f)));
    return out;
}

// Frame-aligned (noisy, clean) training pairs for one partition.
void load_training_pairs(const DatasetManifest& manifest, const std::string& root,
                         const std::string& partition, std::vector<nn::Tensor>& xs,
                         std::vector<nn::Tensor>& ys) {
    for (const auto& e : partition_entries(manifest, partition)) {
        const Waveform noisy = read_wav((fs::path(root) / e.noisy_path).string());
        Waveform clean = normalize(read_wav(e.clean_path));
        if (clean.sample_rate_hz != kMixRateHz) clean = resample(clean, kMixRateHz);
        auto nx = packed_frames(noisy);
        auto cy = packed_frames(clean);
        if (nx.size() != cy.size())
            throw DomainError("frame count mismatch between noisy and clean for " + e.noisy_path);
        for (size_t i = 0; i < nx.size(); ++i) {
            xs.push_back(std::move(nx[i]));
            ys.push_back(std::move(cy[i]));
        }
    }
    if (xs.empty()) throw ConfigError("no training frames in partition '" + partition + "'");
}

int cmd_synth(const GlobalOpts& g, const std::string& clean_dir, const std::string& noise_dir,
              int variants, double density_scale, std::vector<double> ratios) {
    setup_threads(g);
    if (ratios.size() != 3) throw ConfigError("--ratios needs exactly 3 values");
    log_run_config(g, "synth",
                   {{"clean", clean_dir},
                    {"noise", noise_dir},
                    {"variants", variants},
                    {"density_scale", density_scale},
                    {"ratios", ratios}});

    const auto clean = load_clean_dir(clean_dir);
    const auto noise = load_noise_dir(noise_dir);
    SynthesisOptions opts;
    opts.variants_per_clean = variants;
    opts.master_seed = g.seed;
    opts.density_scale = density_scale;

    auto manifest = synthesize_dataset(clean, noise, g.out_dir, opts);
    Rng split_rng(derive_seed(g.seed, "split"));
    manifest = split_dataset(manifest, {ratios[0], ratios[1], ratios[2]}, split_rng);
    save_manifest(manifest, (fs::path(g.out_dir) / "manifest.json").string());

    std::cout << "synth: " << manifest.entries.size() << " noisy recordings from " << clean.size()
              << " clean subjects -> " << g.out_dir << "\n";
    return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& manifest_path, const std::string& model_kind,
              int batch_size, int max_epochs, int patience, double lr) {
    setup_threads(g);
    log_run_config(g, "train",
                   {{"manifest", manifest_path},
                    {"model", model_kind},
                    {"batch", batch_size},
                    {"epochs", max_epochs},
                    {"patience", patience},
                    {"lr", lr}});

    const auto manifest = load_manifest(manifest_path);
    const std::string root = fs::path(manifest_path).parent_path().string();

    std::vector<nn::Tensor> train_x, train_y, val_x, val_y;
    load_training_pairs(manifest, root, "train", train_x, train_y);
    load_training_pairs(manifest, root, "val", val_x, val_y);
    std::cout << "train: " << train_x.size() << " training frames, " << val_x.size()
              << " validation frames\n";

    nn::Model model;
    if (model_kind == "unet") {
        model = build_unet<float>(UNetConfig{}, derive_seed(g.seed, "unet-init"));
    } else if (model_kind == "dae") {
        model = build_dae<float>(DAEConfig{}, derive_seed(g.seed, "dae-init"));
    } else {
        throw ConfigError("unknown --model '" + model_kind + "' (expected unet or dae)");
    }

    nn::TrainConfig cfg;
    cfg.batch_size = batch_size;
    cfg.max_epochs = max_epochs;
    cfg.patience = patience;
    cfg.seed = derive_seed(g.seed, "train-loop");
    nn::NadamState<float> opt;
    opt.lr = lr;

    const auto result =
        nn::train(model, train_x, train_y, val_x, val_y, cfg, opt,
                  [](int epoch, const nn::EpochStats& s) {
                      std::cout << "epoch " << epoch + 1 << ": train mse " << s.train_mse
                                << ", val mse " << s.val_mse << "\n";
                  });

    fs::create_directories(g.out_dir);
    const std::string ckpt = (fs::path(g.out_dir) / (model_kind + ".pcgu")).string();
    nn::save_model_checkpoint(ckpt, model, &opt);

    {
        std::ofstream hist(fs::path(g.out_dir) / (model_kind + "_history.csv"), std::ios::trunc);
        hist << "epoch,train_mse,val_mse\n";
        for (size_t i = 0; i < result.history.size(); ++i)
            hist << i + 1 << "," << result.history[i].train_mse << ","
                 << result.history[i].val_mse << "\n";
        hist << "# best_epoch=" << result.best_epoch + 1
             << " best_val_mse=" << result.best_val_mse
             << " early_stopped=" << (result.early_stopped ? "yes" : "no") << "\n";
    }
    {
        json sidecar = {{"model", model_kind},
                        {"seed", g.seed},
                        {"encoder_filters", UNetConfig{}.encoder_filters},
                        {"bottleneck_filters", UNetConfig{}.bottleneck_filters},
                        {"batch", batch_size},
                        {"max_epochs", max_epochs},
                        {"patience", patience},
                        {"lr", lr},
                        {"best_epoch", result.best_epoch + 1},
                        {"best_val_mse", result.best_val_mse},
                        {"early_stopped", result.early_stopped},
                        {"param_count", model.param_count()}};
        std::ofstream f(fs::path(g.out_dir) / (model_kind + "_config.json"), std::ios::trunc);
        f << sidecar.dump(2) << "\n";
    }
    std::cout << "train: best val mse " << result.best_val_mse << " at epoch "
              << result.best_epoch + 1 << (result.early_stopped ? " (early stop)" : "") << " -> "
              << ckpt << "\n";
    return 0;
}

// One denoising method by name; nn methods need a checkpoint.
EvalMethod make_method(const std::string& name, const std::string& checkpoint,
                       std::shared_ptr<nn::Model>& keep_alive) {
    if (name == "wt") {
        return {"wt", [](const Waveform& noisy) {
                    return wt_denoise(resample(noisy, kModelRateHz), WaveletConfig{});
                }};
    }
    if (name == "noop") {
        return {"noop", [](const Waveform& noisy) { return resample(noisy, kModelRateHz); }};
    }
    if (name == "unet" || name == "dae") {
        if (checkpoint.empty())
            throw ConfigError("method '" + name + "' needs --checkpoint-" + name);
        auto model = std::make_shared<nn::Model>(
            name == "unet" ? build_unet<float>(UNetConfig{}, 0) : build_dae<float>(DAEConfig{}, 0));
        nn::load_model_checkpoint(checkpoint, *model);
        keep_alive = model;
        return {name, [model](const Waveform& noisy) { return denoise_waveform(*model, noisy); }};
    }
    throw ConfigError("unknown method '" + name + "' (expected unet, dae, wt or noop)");
}

int cmd_denoise(const GlobalOpts& g, const std::string& method, const std::string& input,
                const std::string& manifest_path, const std::string& ckpt_unet,
                const std::string& ckpt_dae) {
    setup_threads(g);
    log_run_config(g, "denoise",
                   {{"method", method},
                    {"in", input},
                    {"manifest", manifest_path},
                    {"checkpoint_unet", ckpt_unet},
                    {"checkpoint_dae", ckpt_dae}});

    std::shared_ptr<nn::Model> keep_alive;
    const std::string ckpt = method == "dae" ? ckpt_dae : ckpt_unet;
    const EvalMethod m = make_method(method, ckpt, keep_alive);

    fs::create_directories(g.out_dir);
    auto run_one = [&](const std::string& in_path, const std::string& out_name) {
        Waveform noisy = read_wav(in_path);
        if (noisy.sample_rate_hz != kMixRateHz) noisy = resample(noisy, kMixRateHz);
        const Waveform est = m.denoise(noisy);
        write_wav(est, (fs::path(g.out_dir) / out_name).string());
    };

    if (!input.empty()) {
        const std::string name = fs::path(input).stem().string() + "_" + method + ".wav";
        run_one(input, name);
        std::cout << "denoise: 1 file -> " << g.out_dir << "\n";
    } else if (!manifest_path.empty()) {
        const auto manifest = load_manifest(manifest_path);
        const std::string root = fs::path(manifest_path).parent_path().string();
        int count = 0;
        for (const auto& e : partition_entries(manifest, "test")) {
            const std::string name =
                fs::path(e.noisy_path).stem().string() + "_" + method + ".wav";
            run_one((fs::path(root) / e.noisy_path).string(), name);
            ++count;
        }
        std::cout << "denoise: " << count << " test recordings -> " << g.out_dir << "\n";
    } else {
        throw ConfigError("denoise needs --in FILE or --manifest PATH");
    }
    return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& manifest_path, std::vector<std::string> method_names,
             const std::string& ckpt_unet, const std::string& ckpt_dae) {
    setup_threads(g);
    log_run_config(g, "eval",
                   {{"manifest", manifest_path},
                    {"methods", method_names},
                    {"checkpoint_unet", ckpt_unet},
                    {"checkpoint_dae", ckpt_dae}});

    const auto manifest = load_manifest(manifest_path);
    const std::string root = fs::path(manifest_path).parent_path().string();

    std::vector<EvalMethod> methods;
    std::vector<std::shared_ptr<nn::Model>> keep;
    for (const auto& name : method_names) {
        if (name == "noop") continue; // evaluate() appends it automatically
        std::shared_ptr<nn::Model> model;
        methods.push_back(make_method(name, name == "dae" ? ckpt_dae : ckpt_unet, model));
        if (model) keep.push_back(std::move(model));
    }

    const auto report = evaluate(manifest, root, methods, "test");
    fs::create_directories(g.out_dir);
    std::ofstream csv(fs::path(g.out_dir) / "report.csv", std::ios::trunc);
    csv << report.to_csv();
    std::cout << report.to_table();
    std::cout << "eval: report -> " << (fs::path(g.out_dir) / "report.csv").string() << "\n";
    return 0;
}

int cmd_stats(const GlobalOpts& g, const std::string& manifest_path) {
    setup_threads(g);
    log_run_config(g, "stats", {{"manifest", manifest_path}});
    const auto manifest = load_manifest(manifest_path);
    const auto stats = segment_stats(manifest);

    fs::create_directories(g.out_dir);
    std::ofstream csv(fs::path(g.out_dir) / "segment_stats.csv", std::ios::trunc);
    csv << "category,count,mean_s,std_s,mode_s\n";
    std::cout << "category              count   mean(s)  std(s)  mode(s)\n";
    for (const auto& [cat, st] : stats) {
        csv << category_token(cat) << "," << st.count << "," << st.mean_s << "," << st.std_s << ","
            << st.mode_s << "\n";
        std::printf("%-20s %7lld   %.3f    %.3f   %.3f\n", category_token(cat).c_str(),
                    static_cast<long long>(st.count), st.mean_s, st.std_s, st.mode_s);
    }
    return 0;
}

int cmd_plot(const GlobalOpts& g, const std::string& manifest_path, const std::string& rec_id,
             const std::string& ckpt_unet, const std::string& ckpt_dae) {
    setup_threads(g);
    log_run_config(g, "plot",
                   {{"manifest", manifest_path},
                    {"id", rec_id},
                    {"checkpoint_unet", ckpt_unet},
                    {"checkpoint_dae", ckpt_dae}});

    const auto manifest = load_manifest(manifest_path);
    const std::string root = fs::path(manifest_path).parent_path().string();

    const ManifestEntry* entry = nullptr;
    for (const auto& e : manifest.entries) {
        const std::string id = e.recipe.clean_id + "_v" + std::to_string(e.recipe.variant_index);
        if (id == rec_id) {
            entry = &e;
            break;
        }
    }
    if (!entry) throw ConfigError("recording id '" + rec_id + "' not found in the manifest");

    Waveform noisy = read_wav((fs::path(root) / entry->noisy_path).string());
    if (noisy.sample_rate_hz != kMixRateHz) noisy = resample(noisy, kMixRateHz);
    Waveform clean = normalize(read_wav(entry->clean_path));
    if (clean.sample_rate_hz != kMixRateHz) clean = resample(clean, kMixRateHz);

    std::vector<TraceSeries> series;
    series.push_back({"clean", resample(clean, kModelRateHz).samples});
    series.push_back({"noisy", resample(noisy, kModelRateHz).samples});

    std::shared_ptr<nn::Model> keep;
    if (!ckpt_unet.empty()) {
        const EvalMethod m = make_method("unet", ckpt_unet, keep);
        series.push_back({"unet", m.denoise(noisy).samples});
    }
    std::shared_ptr<nn::Model> keep2;
    if (!ckpt_dae.empty()) {
        const EvalMethod m = make_method("dae", ckpt_dae, keep2);
        series.push_back({"dae", m.denoise(noisy).samples});
    }
    series.push_back({"wt", wt_denoise(resample(noisy, kModelRateHz), WaveletConfig{}).samples});

    fs::create_directories(g.out_dir);
    write_traces_csv((fs::path(g.out_dir) / (rec_id + "_traces.csv")).string(), series);
    write_traces_svg((fs::path(g.out_dir) / (rec_id + "_traces.svg")).string(), series,
                     "denoising overlays: " + rec_id);

    // spectrum heatmap of the first frame of the noisy recording
    const auto frames = frame_signal(resample(noisy, kModelRateHz));
    write_heatmap_csv((fs::path(g.out_dir) / (rec_id + "_spectrum.csv")).string(),
                      stft(frames.front()));
    std::cout << "plot: traces + spectrum for " << rec_id << " -> " << g.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phonocardiogram denoising toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
    app.add_option("--config", g.config_path, "JSON config file (flags win)");
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)")
        ->capture_default_str();
    app.add_flag("--deterministic", g.deterministic, "single-threaded reproducible mode");

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize the noisy dataset");
    std::string clean_dir, noise_dir;
    int variants = 20;
    double density_scale = 1.0;
    std::vector<double> ratios{0.64, 0.16, 0.20};
    synth->add_option("--clean", clean_dir, "clean WAV directory")->required();
    synth->add_option("--noise", noise_dir, "noise corpus directory")->required();
    synth->add_option("--variants", variants, "noisy variants per clean recording")
        ->capture_default_str();
    synth->add_option("--density-scale", density_scale, "segment count rate multiplier")
        ->capture_default_str();
    synth->add_option("--ratios", ratios, "train/val/test ratios")->expected(3);

    // train
    auto* train = app.add_subcommand("train", "train the U-Net or the DAE baseline");
    std::string manifest_path, model_kind = "unet";
    int batch_size = 128, max_epochs = 100, patience = 10;
    double lr = 5e-4;
    train->add_option("--manifest", manifest_path, "manifest.json from synth")->required();
    train->add_option("--model", model_kind, "unet | dae")->capture_default_str();
    train->add_option("--batch", batch_size, "batch size")->capture_default_str();
    train->add_option("--epochs", max_epochs, "maximum epochs")->capture_default_str();
    train->add_option("--patience", patience, "early-stopping patience")->capture_default_str();
    train->add_option("--lr", lr, "learning rate")->capture_default_str();

    // denoise
    auto* denoise = app.add_subcommand("denoise", "denoise a recording or the test partition");
    std::string method = "unet", input_file, den_manifest, ckpt_unet, ckpt_dae;
    denoise->add_option("--method", method, "unet | dae | wt | noop")->capture_default_str();
    denoise->add_option("--in", input_file, "input WAV file");
    denoise->add_option("--manifest", den_manifest, "manifest.json (batch mode over test)");
    denoise->add_option("--checkpoint-unet", ckpt_unet, "U-Net checkpoint");
    denoise->add_option("--checkpoint-dae", ckpt_dae, "DAE checkpoint");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "metric report over the test partition");
    std::string eval_manifest;
    std::vector<std::string> methods{"unet", "wt", "dae"};
    std::string eval_ckpt_unet, eval_ckpt_dae;
    eval_cmd->add_option("--manifest", eval_manifest, "manifest.json")->required();
    eval_cmd->add_option("--methods", methods, "methods to evaluate")->capture_default_str();
    eval_cmd->add_option("--checkpoint-unet", eval_ckpt_unet, "U-Net checkpoint");
    eval_cmd->add_option("--checkpoint-dae", eval_ckpt_dae, "DAE checkpoint");

    // stats
    auto* stats = app.add_subcommand("stats", "segment duration statistics from a manifest");
    std::string stats_manifest;
    stats->add_option("--manifest", stats_manifest, "manifest.json")->required();

    // plot
    auto* plot = app.add_subcommand("plot", "trace overlays and spectrum heatmap data");
    std::string plot_manifest, plot_id, plot_ckpt_unet, plot_ckpt_dae;
    plot->add_option("--manifest", plot_manifest, "manifest.json")->required();
    plot->add_option("--id", plot_id, "recording id, e.g. subject001_v3")->required();
    plot->add_option("--checkpoint-unet", plot_ckpt_unet, "U-Net checkpoint");
    plot->add_option("--checkpoint-dae", plot_ckpt_dae, "DAE checkpoint");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage errors exit 2
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        merge_config(app, *cmd, g.config_path);
        if (cmd == synth)
            return cmd_synth(g, clean_dir, noise_dir, variants, density_scale, ratios);
        if (cmd == train)
            return cmd_train(g, manifest_path, model_kind, batch_size, max_epochs, patience, lr);
        if (cmd == denoise)
            return cmd_denoise(g, method, input_file, den_manifest, ckpt_unet, ckpt_dae);
        if (cmd == eval_cmd)
            return cmd_eval(g, eval_manifest, methods, eval_ckpt_unet, eval_ckpt_dae);
        if (cmd == stats) return cmd_stats(g, stats_manifest);
        if (cmd == plot)
            return cmd_plot(g, plot_manifest, plot_id, plot_ckpt_unet, plot_ckpt_dae);
        std::cerr << "pcgd: no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "pcgd: " << e.what() << "\n";
        return 1;
    }
}
