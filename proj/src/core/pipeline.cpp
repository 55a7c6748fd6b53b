#include "meshwm/pipeline.hpp"

#include "meshwm/error.hpp"
#include "meshwm/io.hpp"
#include "meshwm/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace meshwm {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

double to_double(std::string_view key, std::string_view v)
{
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError("config: " + std::string(key) + " expects a number, got '" + std::string(v) + "'");
    return out;
}

long long to_int(std::string_view key, std::string_view v)
{
    long long out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError("config: " + std::string(key) + " expects an integer, got '" + std::string(v) + "'");
    return out;
}

bool to_bool(std::string_view key, std::string_view v)
{
    if (v == "on" || v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "off" || v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError("config: " + std::string(key) + " expects on/off, got '" + std::string(v) + "'");
}

// Shortest text that reads back to the same double.
std::string fmt(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string digest_of(std::span<const std::uint32_t> v)
{
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto x : v)
        h = hash_seed(h, x);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<double> shaping_target(const PipelineConfig& cfg)
{
    const auto alphabet = cfg.alphabet();
    const auto dmc = dmc_matrix(alphabet, DeletionChannelSpec{cfg.decoder_p_d, cfg.s_d, 0});
    std::vector<double> costs(alphabet.run_lengths.begin(), alphabet.run_lengths.end());
    return unit_cost_capacity(dmc.P, costs).p_star;
}

} // namespace

void PipelineConfig::set(std::string_view key, std::string_view value, const std::string& base_dir)
{
    if (key == "delta")
        delta = to_double(key, value);
    else if (key == "L") {
        const auto v = to_int(key, value);
        if (v < 1)
            throw ConfigError("config: L must be at least 1");
        L = static_cast<std::size_t>(v);
    } else if (key == "alphabet.bits_per_symbol") {
        const auto v = to_int(key, value);
        if (v < 1 || v > 8)
            throw ConfigError("config: alphabet.bits_per_symbol must be in [1, 8]");
        bits_per_symbol = static_cast<unsigned>(v);
    } else if (key == "s_d") {
        const auto v = to_int(key, value);
        if (v < 1 || v > 16)
            throw ConfigError("config: s_d must be in [1, 16]");
        s_d = static_cast<unsigned>(v);
    } else if (key == "code") {
        std::filesystem::path p{std::string(value)};
        if (p.is_relative() && !base_dir.empty())
            p = std::filesystem::path(base_dir) / p;
        code_path = p.lexically_normal().string();
    } else if (key == "stability.w_gauss")
        stability.w_gauss = to_double(key, value);
    else if (key == "stability.w_mean")
        stability.w_mean = to_double(key, value);
    else if (key == "stability.w_concave")
        stability.w_concave = to_double(key, value);
    else if (key == "stability.risky_percentile")
        stability.risky_percentile = to_double(key, value);
    else if (key == "polarity") {
        const auto v = to_int(key, value);
        if (v != 0 && v != 1)
            throw ConfigError("config: polarity must be 0 or 1");
        polarity = static_cast<int>(v);
    } else if (key == "decoder.p_d")
        decoder_p_d = to_double(key, value);
    else if (key == "decoder.max_iter") {
        const auto v = to_int(key, value);
        if (v < 1 || v > 100000)
            throw ConfigError("config: decoder.max_iter must be in [1, 100000]");
        decoder_max_iter = static_cast<int>(v);
    } else if (key == "transformer")
        transformer = to_bool(key, value);
    else if (key == "frame") {
        if (value == "surface")
            frame = CentroidMode::Surface;
        else if (value == "vertex")
            frame = CentroidMode::VertexMean;
        else
            throw ConfigError("config: frame must be 'surface' or 'vertex'");
    } else if (key == "payload_bits") {
        if (value == "auto") {
            payload_bits.reset();
        } else {
            const auto v = to_int(key, value);
            if (v < 0)
                throw ConfigError("config: payload_bits must be non-negative");
            payload_bits = static_cast<std::size_t>(v);
        }
    } else
        throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

PipelineConfig PipelineConfig::parse(std::string_view text, const std::string& base_dir)
{
    PipelineConfig cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        const auto key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        try {
            cfg.set(key, value, base_dir);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path)
{
    return parse(read_text_file(path), std::filesystem::path(path).parent_path().string());
}

std::string PipelineConfig::dump() const
{
    std::ostringstream out;
    out << "delta=" << fmt(delta) << '\n'
        << "L=" << L << '\n'
        << "alphabet.bits_per_symbol=" << bits_per_symbol << '\n'
        << "s_d=" << s_d << '\n'
        << "code=" << code_path << '\n'
        << "stability.w_gauss=" << fmt(stability.w_gauss) << '\n'
        << "stability.w_mean=" << fmt(stability.w_mean) << '\n'
        << "stability.w_concave=" << fmt(stability.w_concave) << '\n'
        << "stability.risky_percentile=" << fmt(stability.risky_percentile) << '\n'
        << "polarity=" << polarity << '\n'
        << "decoder.p_d=" << fmt(decoder_p_d) << '\n'
        << "decoder.max_iter=" << decoder_max_iter << '\n'
        << "transformer=" << (transformer ? "on" : "off") << '\n'
        << "frame=" << (frame == CentroidMode::Surface ? "surface" : "vertex") << '\n'
        << "payload_bits=" << (payload_bits ? std::to_string(*payload_bits) : std::string("auto")) << '\n';
    return out.str();
}

void PipelineConfig::validate() const
{
    if (!(delta > 0.0) || !(delta < 1.0))
        throw ConfigError("config: delta must lie in (0, 1)");
    if (L < 1)
        throw ConfigError("config: L must be at least 1");
    if (bits_per_symbol < 1 || bits_per_symbol > 8)
        throw ConfigError("config: alphabet.bits_per_symbol must be in [1, 8]");
    if (s_d < 1)
        throw ConfigError("config: s_d must be at least 1");
    if (polarity != 0 && polarity != 1)
        throw ConfigError("config: polarity must be 0 or 1");
    if (decoder_max_iter < 1)
        throw ConfigError("config: decoder.max_iter must be positive");
    for (double w : {stability.w_gauss, stability.w_mean, stability.w_concave})
        if (!(w >= 0.0))
            throw ConfigError("config: stability weights must be non-negative");
    if (!(stability.risky_percentile >= 0.0 && stability.risky_percentile <= 100.0))
        throw ConfigError("config: stability.risky_percentile must lie in [0, 100]");
    try {
        DeletionChannelSpec{decoder_p_d, s_d, 0}.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("config: decoder.p_d: ") + e.what());
    }
}

RunAlphabet PipelineConfig::alphabet() const { return RunAlphabet::standard(bits_per_symbol, s_d); }

QimConfig PipelineConfig::qim(std::uint64_t key) const { return QimConfig{delta, L, key}; }

Framing framing_for(const LdpcCode& code, const PipelineConfig& cfg)
{
    const auto alphabet = cfg.alphabet();
    Framing f;
    f.k = code.k();
    f.n = code.n();
    f.symbols = (f.n + cfg.bits_per_symbol - 1) / cfg.bits_per_symbol;
    f.channel_bits = f.symbols * alphabet.max_run() + alphabet.min_run();
    f.selection_size = f.channel_bits * cfg.L;
    return f;
}

std::string EmbedReport::to_json() const
{
    nlohmann::ordered_json j;
    j["selection_digest"] = selection_digest;
    j["payload_bits"] = payload_bits;
    j["padding_bits"] = padding_bits;
    j["data_channel_bits"] = data_channel_bits;
    j["framing"] = {{"k", framing.k},
                    {"n", framing.n},
                    {"symbols", framing.symbols},
                    {"channel_bits", framing.channel_bits},
                    {"selection_size", framing.selection_size}};
    j["hausdorff"] = hausdorff;
    j["scale_ref"] = scale_ref;
    j["hausdorff_bound"] = hausdorff_bound;
    j["config"] = config;
    j["selection"] = selection;
    return j.dump(2) + "\n";
}

EmbedReport EmbedReport::from_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("embed report: ") + e.what());
    }
    EmbedReport r;
    try {
        r.selection = j.at("selection").get<std::vector<std::uint32_t>>();
        r.payload_bits = j.at("payload_bits").get<std::size_t>();
        if (j.contains("selection_digest"))
            r.selection_digest = j["selection_digest"].get<std::string>();
        if (j.contains("config"))
            r.config = j["config"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("embed report: ") + e.what());
    }
    return r;
}

EmbedResult embed_watermark(const Mesh& mesh, std::span<const std::uint8_t> payload, std::uint64_t key,
                            const PipelineConfig& cfg, const LdpcCode& code)
{
    cfg.validate();
    const auto alphabet = cfg.alphabet();
    const Framing fr = framing_for(code, cfg);

    std::vector<std::uint8_t> message;
    if (cfg.transformer) {
        const auto syms = DistributionTransformer(shaping_target(cfg)).transform(payload);
        message = symbols_to_bits(syms, cfg.bits_per_symbol);
    } else {
        message.assign(payload.begin(), payload.end());
    }
    if (message.size() > fr.k)
        throw CapabilityError("embed: payload needs " + std::to_string(message.size()) + " message bits, code carries k=" +
                              std::to_string(fr.k));
    EmbedReport report;
    report.payload_bits = payload.size();
    report.padding_bits = fr.k - message.size();
    message.resize(fr.k, 0);

    auto codeword = encode(code, message);
    codeword.resize(fr.symbols * cfg.bits_per_symbol, 0);
    const auto symbols = bits_to_symbols(codeword, cfg.bits_per_symbol);
    auto channel = rl_encode(symbols, alphabet, cfg.polarity);
    report.data_channel_bits = channel.size();
    // one run of the opposite polarity closes the last symbol and fills the frame
    const auto fill = static_cast<std::uint8_t>(cfg.polarity ^ static_cast<int>(fr.symbols & 1u));
    channel.resize(fr.channel_bits, fill);

    const auto ranking = stability_rank(mesh, cfg.stability);
    if (ranking.size() < fr.selection_size)
        throw CapabilityError("embed: mesh has " + std::to_string(ranking.size()) + " stable vertices, frame needs " +
                              std::to_string(fr.selection_size));
    // Carriers that cannot settle within delta/2 are swapped for the next
    // ranked vertices.
    std::vector<std::uint8_t> excluded(mesh.vertex_count(), 0);
    std::vector<std::uint32_t> order;
    Mesh marked;
    for (int attempt = 0;; ++attempt) {
        std::vector<std::uint32_t> chosen;
        for (auto v : ranking.indices) {
            if (chosen.size() == fr.selection_size)
                break;
            if (!excluded[v])
                chosen.push_back(v);
        }
        if (chosen.size() < fr.selection_size)
            throw CapabilityError("embed: not enough stable vertices settle on the lattice");
        order = interleave_selection(std::move(chosen), key);
        std::vector<std::uint32_t> unsettled;
        marked = embed_bits_in_mesh(mesh, order, channel, cfg.qim(key), cfg.frame, &unsettled);
        if (unsettled.empty() || attempt == 8)
            break;
        for (auto v : unsettled)
            excluded[v] = 1;
    }

    report.selection = order;
    report.selection_digest = digest_of(order);
    report.framing = fr;
    report.hausdorff = hausdorff(mesh.vertices(), marked.vertices());
    report.scale_ref = compute_frame(marked, cfg.frame).scale_ref;
    report.hausdorff_bound = 0.5 * cfg.delta * report.scale_ref;
    report.config = cfg.dump();
    return {std::move(marked), std::move(report)};
}

std::string ExtractReport::to_json() const
{
    nlohmann::ordered_json j;
    j["mode"] = mode;
    j["payload"] = format_payload(payload);
    j["payload_bits"] = payload.size();
    j["converged"] = converged;
    j["iterations"] = iterations;
    j["carriers"] = carriers;
    j["carriers_expected"] = carriers_expected;
    j["runs_observed"] = runs_observed;
    j["erased_symbols"] = erased_symbols;
    if (p_hat)
        j["p_hat"] = *p_hat;
    if (max_consecutive_deleted)
        j["max_consecutive_deleted"] = *max_consecutive_deleted;
    j["config"] = config;
    return j.dump(2) + "\n";
}

ExtractReport decode_channel_bits(std::span<const std::uint8_t> channel_bits, const PipelineConfig& cfg,
                                  const LdpcCode& code)
{
    cfg.validate();
    const auto alphabet = cfg.alphabet();
    const Framing fr = framing_for(code, cfg);
    ExtractReport rep;
    rep.config = cfg.dump();

    RunObservation obs = parse_runs(channel_bits);
    rep.runs_observed = obs.lengths.size();
    if (obs.lengths.size() > fr.symbols)
        obs.lengths.resize(fr.symbols);

    // Decimation occasionally removes s_d + 1 carriers from one run. Under the
    // strict model the shortened run reads as a certain, wrong symbol that the
    // decoder cannot overturn, so that event keeps probability p_d^(s_d+1).
    const double overflow = std::pow(cfg.decoder_p_d, static_cast<double>(cfg.s_d + 1));
    const auto lik = rl_likelihoods(obs, alphabet, cfg.decoder_p_d, cfg.s_d, overflow);
    for (const auto& row : lik)
        if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; }))
            ++rep.erased_symbols;
    auto llr = bit_llr_from_likelihoods(lik, alphabet, {}, false);
    rep.erased_symbols += fr.symbols - obs.lengths.size();
    llr.resize(fr.symbols * cfg.bits_per_symbol, 0.0);
    llr.resize(fr.n);

    const auto dec = sp_decode(code, llr, cfg.decoder_max_iter);
    rep.converged = dec.converged;
    rep.iterations = dec.iterations;
    auto message = message_from_codeword(code, dec.bits);

    if (cfg.transformer) {
        if (!cfg.payload_bits)
            throw ConfigError("extract: payload_bits must be set when the transformer is on");
        message.resize(message.size() - message.size() % cfg.bits_per_symbol);
        const auto syms = bits_to_symbols(message, cfg.bits_per_symbol);
        try {
            rep.payload = DistributionTransformer(shaping_target(cfg)).inverse(syms, *cfg.payload_bits);
        } catch (const InvalidArgument&) {
            // a failed decode can leave too little information for the requested length
            rep.payload.assign(*cfg.payload_bits, 0);
            rep.converged = false;
        }
    } else {
        const std::size_t len = cfg.payload_bits.value_or(fr.k);
        if (len > fr.k)
            throw ConfigError("extract: payload_bits exceeds code dimension k=" + std::to_string(fr.k));
        message.resize(len);
        rep.payload = std::move(message);
    }
    return rep;
}

ExtractReport extract_blind(const Mesh& mesh, std::uint64_t key, const PipelineConfig& cfg, const LdpcCode& code)
{
    cfg.validate();
    const Framing fr = framing_for(code, cfg);
    const auto frame = compute_frame(mesh, cfg.frame);
    const auto ranking = stability_rank(mesh, cfg.stability);

    std::vector<std::uint32_t> carriers;
    if (cfg.L == 1) {
        // carriers are the vertices whose radius sits on the quantizer lattice
        std::vector<std::uint32_t> rank_pos(mesh.vertex_count(), 0xffffffffu);
        for (std::size_t i = 0; i < ranking.size(); ++i)
            rank_pos[ranking.indices[i]] = static_cast<std::uint32_t>(i);
        for (std::uint32_t v = 0; v < mesh.vertex_count(); ++v) {
            const double r = (mesh.vertex(v) - frame.origin).norm() / frame.scale_ref;
            if (r > 0.0 && lattice_residual(r, cfg.delta) < kLatticeTolerance)
                carriers.push_back(v);
        }
        if (carriers.size() > fr.selection_size) {
            std::stable_sort(carriers.begin(), carriers.end(),
                             [&](auto a, auto b) { return rank_pos[a] < rank_pos[b]; });
            carriers.resize(fr.selection_size);
        }
    } else {
        const std::size_t take = std::min(fr.selection_size, ranking.size());
        carriers.assign(ranking.indices.begin(), ranking.indices.begin() + static_cast<std::ptrdiff_t>(take));
        carriers.resize(carriers.size() - carriers.size() % cfg.L);
    }
    const auto order = interleave_selection(carriers, key);
    const auto raw = extract_bits_with_frame(mesh, order, cfg.qim(key), frame);
    std::vector<std::uint8_t> bits(raw.begin(), raw.end());

    auto rep = decode_channel_bits(bits, cfg, code);
    rep.mode = "blind";
    rep.carriers = order.size();
    rep.carriers_expected = fr.selection_size;
    return rep;
}

ExtractReport extract_oracle(const Mesh& attacked, std::span<const std::uint32_t> selection, const SurvivalMap& map,
                             std::uint64_t key, const PipelineConfig& cfg, const LdpcCode& code)
{
    cfg.validate();
    const Framing fr = framing_for(code, cfg);
    if (selection.size() != fr.selection_size)
        throw ConfigError("extract: selection has " + std::to_string(selection.size()) +
                          " vertices but this code and config frame " + std::to_string(fr.selection_size));
    if (map.original_count() == 0 || map.survivor_count() != attacked.vertex_count())
        throw InvalidArgument("extract: survival map does not match the attacked mesh");
    const auto remapped = remap_selection(selection, map);
    const auto raw = extract_bits_with_frame(attacked, remapped, cfg.qim(key), compute_frame(attacked, cfg.frame));
    std::vector<std::uint8_t> bits;
    bits.reserve(raw.size());
    for (auto b : raw)
        if (b != kDeletedBit)
            bits.push_back(static_cast<std::uint8_t>(b));

    auto rep = decode_channel_bits(bits, cfg, code);
    const auto pattern = deletion_pattern(selection, map);
    rep.mode = "oracle";
    rep.carriers = selection.size() - static_cast<std::size_t>(std::count(remapped.begin(), remapped.end(), kMissingVertex));
    rep.carriers_expected = fr.selection_size;
    rep.p_hat = pattern.p_hat;
    rep.max_consecutive_deleted = pattern.max_consecutive;
    return rep;
}

std::vector<SweepRow> run_sweep(const LdpcCode& code, const RunAlphabet& alphabet, std::span<const double> p_list,
                                const SweepOptions& opt)
{
    alphabet.validate();
    if (opt.frames == 0)
        throw InvalidArgument("sweep: frames must be positive");
    const unsigned b = alphabet.bits_per_symbol;
    const std::size_t nsym = (code.n() + b - 1) / b;
    std::vector<SweepRow> rows;
    for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
        const DeletionChannelSpec spec{p_list[pi], alphabet.s_d, 0};
        spec.validate();
        SweepRow row;
        row.p_d = spec.p_d;
        row.frames = opt.frames;
        double iters = 0.0;
        std::vector<std::uint8_t> msg(code.k());
        for (std::size_t f = 0; f < opt.frames; ++f) {
            Rng rng(hash_seed(opt.seed, pi, f));
            for (auto& bit : msg)
                bit = rng.bit() ? 1 : 0;
            auto cw = encode(code, msg);
            cw.resize(nsym * b, 0);
            const auto tx = rl_encode(bits_to_symbols(cw, b), alphabet, opt.polarity);
            const auto rx = apply_deletion_channel(tx, spec, rng);
            auto obs = parse_runs(rx.bits);
            if (obs.lengths.size() > nsym)
                obs.lengths.resize(nsym);
            auto llr = rl_bit_llr(obs, alphabet, spec.p_d, spec.s_d, {}, false);
            llr.resize(nsym * b, 0.0);
            llr.resize(code.n());
            const auto dec = sp_decode(code, llr, opt.max_iter);
            iters += dec.iterations;
            if (dec.converged && !is_codeword(code.H(), dec.bits))
                ++row.unsound;
            const auto got = message_from_codeword(code, dec.bits);
            std::size_t errs = 0;
            for (std::size_t i = 0; i < msg.size(); ++i)
                errs += got[i] != msg[i];
            row.bit_errors += errs;
            row.frame_errors += errs > 0;
        }
        row.ber = static_cast<double>(row.bit_errors) / (static_cast<double>(opt.frames) * static_cast<double>(code.k()));
        row.fer = static_cast<double>(row.frame_errors) / static_cast<double>(opt.frames);
        row.mean_iterations = iters / static_cast<double>(opt.frames);
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows)
{
    std::ostringstream out;
    out << "p_d,frames,bit_errors,frame_errors,ber,fer,mean_iterations\n";
    for (const auto& r : rows)
        out << fmt(r.p_d) << ',' << r.frames << ',' << r.bit_errors << ',' << r.frame_errors << ',' << fmt(r.ber) << ','
            << fmt(r.fer) << ',' << fmt(r.mean_iterations) << '\n';
    return out.str();
}

std::vector<CapacityRow> capacity_sweep(std::span<const std::size_t> alphabet_sizes, std::span<const double> p_list,
                                        unsigned s_d, double tol, int max_iter)
{
    std::vector<CapacityRow> rows;
    for (double p : p_list) {
        for (auto size : alphabet_sizes) {
            if (size < 2 || (size & (size - 1)) != 0 || size > 256)
                throw ConfigError("capacity: alphabet size " + std::to_string(size) + " must be a power of two in [2, 256]");
            const auto alphabet = RunAlphabet::standard(static_cast<unsigned>(std::countr_zero(size)), s_d);
            const auto dmc = dmc_matrix(alphabet, DeletionChannelSpec{p, s_d, 0});
            std::vector<double> costs(alphabet.run_lengths.begin(), alphabet.run_lengths.end());
            rows.push_back({p, size, unit_cost_capacity(dmc.P, costs, tol, max_iter)});
        }
    }
    return rows;
}

std::string capacity_csv(std::span<const CapacityRow> rows)
{
    std::ostringstream out;
    out << "p_d,alphabet_size,c_unit,iterations,converged,p_star\n";
    for (const auto& r : rows) {
        out << fmt(r.p_d) << ',' << r.alphabet_size << ',' << fmt(r.result.c_unit) << ',' << r.result.iterations << ','
            << (r.result.converged ? 1 : 0) << ',';
        for (std::size_t i = 0; i < r.result.p_star.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", r.result.p_star[i]);
            out << (i ? ";" : "") << buf;
        }
        out << '\n';
    }
    return out.str();
}

double effective_rate(double rate, const RunAlphabet& alphabet)
{
    return rate * alphabet.bits_per_symbol / alphabet.mean_cost();
}

std::string CodegenReport::to_json() const
{
    nlohmann::ordered_json j;
    j["n"] = n;
    j["m"] = m;
    j["k"] = k;
    j["rank"] = rank;
    j["q"] = q;
    j["mu"] = mu;
    j["eta"] = eta;
    j["seed"] = seed;
    j["rate"] = rate;
    j["rate_bound"] = rate_bound;
    j["effective_rate"] = effective_rate;
    j["girth_at_least_6"] = girth6;
    j["regular"] = regular;
    return j.dump(2) + "\n";
}

CodegenReport describe_code(const LdpcCode& code, const RunAlphabet& alphabet)
{
    CodegenReport r;
    r.n = code.n();
    r.m = code.m();
    r.k = code.k();
    r.rank = code.rank();
    r.q = code.q;
    r.mu = code.mu;
    r.eta = code.eta;
    r.seed = code.seed;
    r.rate = code.rate();
    r.effective_rate = effective_rate(r.rate, alphabet);
    r.girth6 = code.girth6();
    if (code.eta > 0)
        r.rate_bound = 1.0 - static_cast<double>(code.mu) / code.eta;
    const auto& H = code.H();
    const std::size_t cw = H.col_lists.empty() ? 0 : H.col_lists[0].size();
    const std::size_t rw = H.row_lists.empty() ? 0 : H.row_lists[0].size();
    r.regular = std::all_of(H.col_lists.begin(), H.col_lists.end(), [&](const auto& c) { return c.size() == cw; }) &&
                std::all_of(H.row_lists.begin(), H.row_lists.end(), [&](const auto& l) { return l.size() == rw; });
    if (code.mu > 0)
        r.regular = r.regular && cw == code.mu && rw == code.eta;
    return r;
}

std::vector<std::uint8_t> parse_payload(std::string_view text)
{
    std::vector<std::uint8_t> bits;
    if (text.rfind("hex:", 0) == 0) {
        for (char c : text.substr(4)) {
            int v;
            if (c >= '0' && c <= '9')
                v = c - '0';
            else if (c >= 'a' && c <= 'f')
                v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F')
                v = c - 'A' + 10;
            else
                throw ParseError(std::string("payload: invalid hex digit '") + c + "'");
            for (int k = 3; k >= 0; --k)
                bits.push_back(static_cast<std::uint8_t>((v >> k) & 1));
        }
        return bits;
    }
    for (char c : text) {
        if (c != '0' && c != '1')
            throw ParseError(std::string("payload: expected 0/1 digits, got '") + c + "'");
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return bits;
}

std::string format_payload(std::span<const std::uint8_t> bits)
{
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits)
        s.push_back(b ? '1' : '0');
    return s;
}

} // namespace meshwm
