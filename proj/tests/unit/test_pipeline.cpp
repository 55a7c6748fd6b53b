#include "meshwm/error.hpp"
#include "meshwm/pipeline.hpp"
#include "meshwm/rng.hpp"
#include "meshwm/synthetic.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <string>

using namespace meshwm;

namespace {

std::vector<std::uint8_t> random_payload(Rng& rng, std::size_t n)
{
    std::vector<std::uint8_t> b(n);
    for (auto& x : b)
        x = rng.bit();
    return b;
}

const LdpcCode& small_code()
{
    static const LdpcCode code = construct_code(13, 3, 6, 1);
    return code;
}

const Mesh& small_mesh()
{
    static const Mesh m = make_feature_sphere(3, 20);
    return m;
}

std::vector<std::uint8_t> prefix(const std::vector<std::uint8_t>& v, std::size_t n)
{
    return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)};
}

} // namespace

TEST_CASE("PipelineConfig: defaults, parse, dump round trip")
{
    const PipelineConfig d;
    CHECK(d.delta == 0.01);
    CHECK(d.L == 1);
    CHECK(d.s_d == 1);
    CHECK(d.polarity == 1);
    CHECK(!d.transformer);

    const auto cfg = PipelineConfig::parse("# comment\n\ndelta = 0.02\nL=2\nalphabet.bits_per_symbol=2 # inline\n"
                                           "stability.w_gauss=0.6\npayload_bits=40\nframe=vertex\n");
    CHECK(cfg.delta == 0.02);
    CHECK(cfg.L == 2);
    CHECK(cfg.bits_per_symbol == 2);
    CHECK(cfg.stability.w_gauss == 0.6);
    CHECK(cfg.payload_bits == 40u);
    CHECK(cfg.frame == CentroidMode::VertexMean);

    const std::string text = cfg.dump();
    CHECK(text.find("delta=0.02\n") != std::string::npos);
    CHECK(PipelineConfig::parse(text).dump() == text);
    CHECK(d.dump().find("payload_bits=auto\n") != std::string::npos);
}

TEST_CASE("PipelineConfig: errors")
{
    CHECK_THROWS_AS(PipelineConfig::parse("colour=blue\n"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse("delta\n"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse("delta=abc\n"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse("delta=2\n"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse("L=0\n"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse("polarity=3\n"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::parse("frame=cube\n"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::load("/nonexistent/meshwm.cfg"), IoError);
    PipelineConfig c;
    CHECK_THROWS_AS(c.set("nope", "1"), ConfigError);
}

TEST_CASE("framing_for")
{
    const auto code = construct_code(7, 2, 3, 1);
    PipelineConfig cfg;
    auto f = framing_for(code, cfg);
    CHECK(f.n == 21);
    CHECK(f.k == code.k());
    CHECK(f.symbols == 21);
    CHECK(f.channel_bits == 21 * 3 + 2);
    CHECK(f.selection_size == f.channel_bits);

    cfg.bits_per_symbol = 2;
    cfg.L = 3;
    f = framing_for(code, cfg);
    CHECK(f.symbols == 11);
    CHECK(f.channel_bits == 11 * 5 + 2);
    CHECK(f.selection_size == 3 * f.channel_bits);
}

TEST_CASE("effective_rate")
{
    CHECK(effective_rate(0.86, RunAlphabet::standard(1)) == doctest::Approx(0.344));
    CHECK(effective_rate(0.78, RunAlphabet::standard(1)) == doctest::Approx(0.312));
    CHECK(effective_rate(1.0, RunAlphabet::standard(2)) == doctest::Approx(2.0 / 3.5));
}

TEST_CASE("parse_payload / format_payload")
{
    CHECK(parse_payload("1011") == std::vector<std::uint8_t>{1, 0, 1, 1});
    CHECK(parse_payload("hex:a5") == std::vector<std::uint8_t>{1, 0, 1, 0, 0, 1, 0, 1});
    CHECK(parse_payload("").empty());
    CHECK(format_payload(parse_payload("0110")) == "0110");
    CHECK_THROWS_AS(parse_payload("10x1"), ParseError);
    CHECK_THROWS_AS(parse_payload("hex:zz"), ParseError);
}

TEST_CASE("embed then blind extract recovers the payload")
{
    const auto& code = small_code();
    PipelineConfig cfg;
    Rng rng(1);
    for (int t = 0; t < 3; ++t) {
        const auto payload = random_payload(rng, code.k() - t);
        const auto res = embed_watermark(small_mesh(), payload, 1000 + t, cfg, code);
        CHECK(res.report.payload_bits == payload.size());
        CHECK(res.report.padding_bits == code.k() - payload.size());
        CHECK(res.report.selection.size() == framing_for(code, cfg).selection_size);
        CHECK(res.report.hausdorff <= res.report.hausdorff_bound);

        const auto ex = extract_blind(res.mesh, 1000 + t, cfg, code);
        CHECK(ex.converged);
        CHECK(ex.mode == "blind");
        CHECK(prefix(ex.payload, payload.size()) == payload);
    }
}

TEST_CASE("embed: zero-length payload and full-length payload")
{
    const auto& code = small_code();
    PipelineConfig cfg;
    const auto empty = embed_watermark(small_mesh(), std::vector<std::uint8_t>{}, 5, cfg, code);
    CHECK(empty.report.padding_bits == code.k());
    const auto ex = extract_blind(empty.mesh, 5, cfg, code);
    CHECK(ex.converged);
    CHECK(ex.payload == std::vector<std::uint8_t>(code.k(), 0));

    Rng rng(2);
    const auto full = random_payload(rng, code.k());
    const auto res = embed_watermark(small_mesh(), full, 6, cfg, code);
    CHECK(res.report.padding_bits == 0);

    CHECK_THROWS_AS(embed_watermark(small_mesh(), random_payload(rng, code.k() + 1), 6, cfg, code), CapabilityError);
}

TEST_CASE("embed: too few stable vertices")
{
    const auto code = construct_code(61, 3, 14, 1);
    PipelineConfig cfg;
    CHECK_THROWS_AS(embed_watermark(make_feature_sphere(1, 8), std::vector<std::uint8_t>{1}, 1, cfg, code),
                    CapabilityError);
}

TEST_CASE("embed is deterministic")
{
    const auto& code = small_code();
    PipelineConfig cfg;
    const std::vector<std::uint8_t> payload{1, 0, 1, 1, 0, 0, 1};
    const auto a = embed_watermark(small_mesh(), payload, 9, cfg, code);
    const auto b = embed_watermark(small_mesh(), payload, 9, cfg, code);
    CHECK(write_obj(a.mesh) == write_obj(b.mesh));
    CHECK(a.report.to_json() == b.report.to_json());
}

TEST_CASE("wrong key does not recover the payload")
{
    const auto& code = small_code();
    PipelineConfig cfg;
    Rng rng(3);
    int matched = 0;
    for (int t = 0; t < 20; ++t) {
        const auto payload = random_payload(rng, code.k());
        const auto res = embed_watermark(small_mesh(), payload, 50 + t, cfg, code);
        const auto ex = extract_blind(res.mesh, 5000 + t, cfg, code);
        matched += ex.payload == payload;
    }
    CHECK(matched == 0);
}

TEST_CASE("oracle extraction after simplification")
{
    const auto& code = small_code();
    PipelineConfig cfg;
    Rng rng(4);
    const auto payload = random_payload(rng, code.k());
    const auto res = embed_watermark(small_mesh(), payload, 77, cfg, code);
    const auto attacked = simplify_mesh(res.mesh, 0.9);
    const auto ex = extract_oracle(attacked.mesh, res.report.selection, attacked.survival, 77, cfg, code);
    REQUIRE(ex.p_hat.has_value());
    CHECK(ex.mode == "oracle");
    CHECK(*ex.p_hat == doctest::Approx(deletion_pattern(res.report.selection, attacked.survival).p_hat));
    if (*ex.p_hat <= 0.02)
        CHECK(ex.payload == payload);

    // the identity attack reads every carrier
    const auto same = simplify_mesh(res.mesh, 1.0);
    const auto ex0 = extract_oracle(same.mesh, res.report.selection, same.survival, 77, cfg, code);
    CHECK(*ex0.p_hat == 0.0);
    CHECK(ex0.payload == payload);
}

TEST_CASE("decode_channel_bits on a noiseless channel stream")
{
    const auto& code = small_code();
    PipelineConfig cfg;
    Rng rng(5);
    const auto msg = random_payload(rng, code.k());
    const auto cw = encode(code, msg);
    std::vector<std::uint32_t> syms(cw.begin(), cw.end());
    auto bits = rl_encode(syms, cfg.alphabet(), cfg.polarity);
    const auto ex = decode_channel_bits(bits, cfg, code);
    CHECK(ex.converged);
    CHECK(ex.payload == msg);
}

TEST_CASE("decode_channel_bits survives a run that lost s_d + 1 bits")
{
    const auto& code = small_code();
    PipelineConfig cfg;
    Rng rng(6);
    const auto msg = random_payload(rng, code.k());
    const auto cw = encode(code, msg);
    std::vector<std::uint32_t> syms(cw.begin(), cw.end());
    auto bits = rl_encode(syms, cfg.alphabet(), cfg.polarity);

    // a 3-run shortened to 1 looks like a 2-run with one deletion
    std::size_t offset = 0, i = 0;
    while (syms[i] != 1)
        offset += cfg.alphabet().run_lengths[syms[i++]];
    bits.erase(bits.begin() + static_cast<std::ptrdiff_t>(offset), bits.begin() + static_cast<std::ptrdiff_t>(offset) + 2);
    const auto ex = decode_channel_bits(bits, cfg, code);
    CHECK(ex.converged);
    CHECK(ex.erased_symbols == 0);
    CHECK(ex.payload == msg);
}

TEST_CASE("EmbedReport JSON round trip")
{
    EmbedReport r;
    r.selection = {5, 2, 9};
    r.payload_bits = 12;
    const auto back = EmbedReport::from_json(r.to_json());
    CHECK(back.selection == r.selection);
    CHECK(back.payload_bits == 12);
    CHECK_THROWS_AS(EmbedReport::from_json("{"), ParseError);
    CHECK_THROWS_AS(EmbedReport::from_json("{\"payload_bits\": 3}"), ParseError);
}

TEST_CASE("sweep: zero deletions give zero errors; CSV; determinism")
{
    const auto& code = small_code();
    SweepOptions opt;
    opt.frames = 200;
    opt.seed = 3;
    const std::vector<double> ps{0.0, 0.05};
    const auto rows = run_sweep(code, RunAlphabet::standard(1), ps, opt);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].bit_errors == 0);
    CHECK(rows[0].frame_errors == 0);
    CHECK(rows[0].ber == 0.0);
    CHECK(rows[1].frames == 200);
    CHECK(rows[1].ber == doctest::Approx(static_cast<double>(rows[1].bit_errors) / (200.0 * code.k())));
    CHECK(rows[1].fer == doctest::Approx(rows[1].frame_errors / 200.0));
    for (const auto& r : rows)
        CHECK(r.unsound == 0);

    const std::string csv = sweep_csv(rows);
    CHECK(csv.rfind("p_d,frames,bit_errors,frame_errors,ber,fer,mean_iterations\n", 0) == 0);
    CHECK(csv.find("\n0.05,200,") != std::string::npos);
    CHECK(sweep_csv(run_sweep(code, RunAlphabet::standard(1), ps, opt)) == csv);
}

TEST_CASE("capacity_sweep and CSV")
{
    const std::vector<std::size_t> sizes{2, 4};
    const std::vector<double> ps{0.0, 0.05};
    const auto rows = capacity_sweep(sizes, ps);
    REQUIRE(rows.size() == 4);
    const std::string csv = capacity_csv(rows);
    CHECK(csv.rfind("p_d,alphabet_size,c_unit,iterations,converged,p_star\n", 0) == 0);
    for (const auto& r : rows)
        if (r.p_d == 0.0 && r.alphabet_size == 2)
            CHECK(std::abs(r.result.c_unit - 0.40569) < 1e-4);
    CHECK_THROWS_AS(capacity_sweep(std::vector<std::size_t>{3}, ps), ConfigError);
}

TEST_CASE("describe_code report")
{
    const auto code = construct_code(7, 2, 3, 4);
    const auto r = describe_code(code, RunAlphabet::standard(1));
    CHECK(r.n == 21);
    CHECK(r.q == 7);
    CHECK(r.girth6);
    CHECK(r.regular);
    CHECK(r.rate_bound == doctest::Approx(1.0 / 3.0));
    CHECK(r.effective_rate == doctest::Approx(0.4 * r.rate));
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j.at("n").get<int>() == 21);
    CHECK(j.at("girth_at_least_6").get<bool>());
}
