#include "tbp/pipeline.hpp"

#include "tbp/classifier.hpp"
#include "tbp/errors.hpp"
#include "tbp/stability.hpp"
#include "tbp/taylor.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace tbp {

namespace {

using nlohmann::json;

constexpr const char *kCodeVersion = "tbp-0.1.0";

std::uint64_t fnv1a(const std::string &s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Leading decimal digits on which a and b agree (relative), capped.
int agreement_digits(const BigReal &a, const BigReal &b, int cap)
{
    BigReal d = abs(a - b);
    if (d == 0) {
        return cap;
    }
    BigReal scale = abs(a) > abs(b) ? abs(a) : abs(b);
    if (scale == 0) {
        return 0;
    }
    long ad = static_cast<long>(floor(-log10(d / scale)));
    if (ad < 0) {
        return 0;
    }
    return static_cast<int>(std::min<long>(ad, cap));
}

int run_command(const char *name, const std::function<int()> &body)
{
    try {
        return body();
    } catch (const io_error &e) {
        std::cerr << name << ": I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument &e) {
        std::cerr << name << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << name << ": " << e.what() << "\n";
        return 1;
    }
}

void ensure_output_dir(const PipelineConfig &cfg)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw io_error("cannot create output directory " + cfg.output_dir);
    }
}

std::string candidate_id(const Candidate &c)
{
    return "c" + std::to_string(c.i) + "_" + std::to_string(c.j);
}

std::vector<Candidate> read_candidates(const PipelineConfig &cfg, const PrecisionCtx &ctx)
{
    std::ifstream in(cfg.candidates_path());
    if (!in) {
        throw io_error("cannot open " + cfg.candidates_path());
    }
    std::vector<Candidate> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        json j = json::parse(line);
        Candidate c;
        c.i = j.at("i").get<int>();
        c.j = j.at("j").get<int>();
        c.vx = make_real(j.at("vx").get<std::string>(), ctx);
        c.vy = make_real(j.at("vy").get<std::string>(), ctx);
        c.t_ret = make_real(j.at("t_ret").get<std::string>(), ctx);
        c.p_ret = make_real(j.at("p_ret").get<std::string>(), ctx);
        out.push_back(c);
    }
    return out;
}

std::vector<Solution> load_catalog_or_solutions(const PipelineConfig &cfg)
{
    if (std::filesystem::exists(cfg.catalog_path())) {
        return read_solutions(cfg.catalog_path());
    }
    return read_solutions(cfg.solutions_path());
}

} // namespace

void PipelineConfig::validate() const
{
    Fraction::parse(step); // throws on malformed step
    if (workers < 1) {
        throw std::invalid_argument("config: workers must be >= 1");
    }
    if (corrector_mode != "canm" && corrector_mode != "classic") {
        throw std::invalid_argument("config: corrector mode must be canm or classic");
    }
    if (export_stride < 1) {
        throw std::invalid_argument("config: export_stride must be >= 1");
    }
    int prev = correct.digits;
    for (const auto &r : verify) {
        if (r.digits <= prev) {
            throw std::invalid_argument("config: verify regimes must strictly increase in digits");
        }
        prev = r.digits;
    }
    (void)PrecisionCtx(scan.digits, scan.order);
    (void)PrecisionCtx(correct.digits, correct.order);
    (void)PrecisionCtx(classify.digits, classify.order);
    for (const auto &r : verify) {
        (void)PrecisionCtx(r.digits, r.order);
    }
}

std::string PipelineConfig::to_json_string() const
{
    json jv = json::array();
    for (const auto &r : verify) {
        jv.push_back({{"digits", r.digits}, {"order", r.order}});
    }
    json j{{"window",
            {{"vx", {vx_lo, vx_hi}},
             {"vy", {vy_lo, vy_hi}},
             {"step", step},
             {"t0", t0},
             {"threshold", threshold}}},
           {"scan", {{"digits", scan.digits}, {"order", scan.order}}},
           {"correct", {{"digits", correct.digits}, {"order", correct.order}}},
           {"verify", jv},
           {"classify", {{"digits", classify.digits}, {"order", classify.order}}},
           {"corrector", {{"mode", corrector_mode}, {"max_iters", max_iters}, {"tau_min", tau_min}}},
           {"workers", workers},
           {"output_dir", output_dir},
           {"resume", resume},
           {"export_stride", export_stride}};
    return j.dump(2);
}

PipelineConfig PipelineConfig::from_json_string(const std::string &text)
{
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw std::invalid_argument("config: malformed JSON");
    }
    PipelineConfig cfg;
    if (j.contains("window")) {
        const auto &w = j["window"];
        if (w.contains("vx")) {
            cfg.vx_lo = w["vx"][0].get<std::string>();
            cfg.vx_hi = w["vx"][1].get<std::string>();
        }
        if (w.contains("vy")) {
            cfg.vy_lo = w["vy"][0].get<std::string>();
            cfg.vy_hi = w["vy"][1].get<std::string>();
        }
        cfg.step = w.value("step", cfg.step);
        cfg.t0 = w.value("t0", cfg.t0);
        cfg.threshold = w.value("threshold", cfg.threshold);
    }
    auto regime = [](const json &r, Regime dflt) {
        return Regime{r.value("digits", dflt.digits), r.value("order", dflt.order)};
    };
    if (j.contains("scan")) {
        cfg.scan = regime(j["scan"], cfg.scan);
    }
    if (j.contains("correct")) {
        cfg.correct = regime(j["correct"], cfg.correct);
    }
    if (j.contains("classify")) {
        cfg.classify = regime(j["classify"], cfg.classify);
    }
    if (j.contains("verify")) {
        cfg.verify.clear();
        for (const auto &r : j["verify"]) {
            cfg.verify.push_back(regime(r, Regime{}));
        }
    }
    if (j.contains("corrector")) {
        const auto &c = j["corrector"];
        cfg.corrector_mode = c.value("mode", cfg.corrector_mode);
        cfg.max_iters = c.value("max_iters", cfg.max_iters);
        cfg.tau_min = c.value("tau_min", cfg.tau_min);
    }
    cfg.workers = j.value("workers", cfg.workers);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.resume = j.value("resume", cfg.resume);
    cfg.export_stride = j.value("export_stride", cfg.export_stride);
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::from_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open config file " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

std::uint64_t PipelineConfig::hash() const
{
    return fnv1a(to_json_string());
}

SearchWindow PipelineConfig::window(const PrecisionCtx &ctx) const
{
    SearchWindow w;
    w.vx_lo = make_real(vx_lo, ctx);
    w.vx_hi = make_real(vx_hi, ctx);
    w.vy_lo = make_real(vy_lo, ctx);
    w.vy_hi = make_real(vy_hi, ctx);
    w.grid_step = Fraction::parse(step);
    w.t0 = make_real(t0, ctx);
    w.threshold = make_real(threshold, ctx);
    return w;
}

CorrectorConfig PipelineConfig::corrector_config(const PrecisionCtx &ctx) const
{
    CorrectorConfig cc;
    cc.mode = corrector_mode == "classic" ? CorrectorMode::Classic : CorrectorMode::Canm;
    cc.max_iters = max_iters;
    cc.tau_min = make_real(tau_min, ctx);
    return cc;
}

std::string PipelineConfig::provenance() const
{
    std::string v;
    for (const auto &r : verify) {
        if (!v.empty()) {
            v += ",";
        }
        v += std::to_string(r.digits) + "/" + std::to_string(r.order);
    }
    return "correct=" + std::to_string(correct.digits) + "/" + std::to_string(correct.order)
           + ";verify=" + v + ";code=" + kCodeVersion + ";cfg=" + hex64(hash());
}

int cmd_scan(const PipelineConfig &cfg)
{
    return run_command("scan", [&]() {
        cfg.validate();
        ensure_output_dir(cfg);
        const PrecisionCtx ctx(cfg.scan.digits, cfg.scan.order);
        SearchWindow w = cfg.window(ctx);
        w.validate();
        if (!cfg.resume) {
            std::error_code ec;
            std::filesystem::remove(cfg.scan_checkpoint_path(), ec);
        }
        ScanResult res = scan(w, ctx, cfg.workers, cfg.scan_checkpoint_path());
        std::ofstream out(cfg.candidates_path() + ".tmp", std::ios::trunc);
        if (!out) {
            throw io_error("cannot write " + cfg.candidates_path());
        }
        for (const auto &c : res.candidates) {
            json j{{"id", candidate_id(c)},
                   {"i", c.i},
                   {"j", c.j},
                   {"vx", format_decimal(c.vx, ctx.decimal_digits)},
                   {"vy", format_decimal(c.vy, ctx.decimal_digits)},
                   {"t_ret", format_decimal(c.t_ret, ctx.decimal_digits)},
                   {"p_ret", format_decimal(c.p_ret, ctx.decimal_digits)}};
            out << j.dump() << "\n";
        }
        out.close();
        std::filesystem::rename(cfg.candidates_path() + ".tmp", cfg.candidates_path());
        std::cout << "scan: nodes=" << res.nodes.size() << " candidates=" << res.candidates.size()
                  << " failures=" << res.failures << "\n";
        return 0;
    });
}

RefineOutcome refine_candidate(const Candidate &cand, const PipelineConfig &cfg)
{
    RefineOutcome out;
    const PrecisionCtx corr_ctx(cfg.correct.digits, cfg.correct.order);
    SearchPoint seed{make_real(format_decimal(cand.vx, cfg.scan.digits), corr_ctx),
                     make_real(format_decimal(cand.vy, cfg.scan.digits), corr_ctx),
                     make_real(format_decimal(cand.t_ret, cfg.scan.digits), corr_ctx)};
    ConvergenceReport rep = correct(seed, corr_ctx, cfg.corrector_config(corr_ctx));
    out.verdict = rep.verdict;
    out.iterations = rep.iterations;
    if (rep.verdict != Verdict::Converged) {
        return out;
    }

    // Polish through the verification regimes (classic mode), seeding each
    // regime with the previous result.
    struct Stage {
        int digits;
        SearchPoint p;
    };
    std::vector<Stage> stages;
    stages.push_back({cfg.correct.digits, rep.solution});
    for (const auto &r : cfg.verify) {
        const PrecisionCtx vctx(r.digits, r.order);
        CorrectorConfig vcc = cfg.corrector_config(vctx);
        vcc.mode = CorrectorMode::Classic;
        SearchPoint sp{make_real(format_decimal(stages.back().p.vx, stages.back().digits), vctx),
                       make_real(format_decimal(stages.back().p.vy, stages.back().digits), vctx),
                       make_real(format_decimal(stages.back().p.T, stages.back().digits), vctx)};
        ConvergenceReport vrep = correct(sp, vctx, vcc);
        if (vrep.verdict != Verdict::Converged) {
            out.verdict = vrep.verdict;
            return out;
        }
        stages.push_back({r.digits, vrep.solution});
    }

    const Stage &last = stages.back();
    int agreed;
    if (stages.size() >= 2) {
        const Stage &prev = stages[stages.size() - 2];
        const int cap = std::min(prev.digits, last.digits) - 2;
        const PrecisionCtx cmp_ctx = PrecisionCtx::for_digits(std::max(last.digits, 20));
        agreed = std::min({agreement_digits(make_real(format_decimal(prev.p.vx, prev.digits), cmp_ctx),
                                            last.p.vx, cap),
                           agreement_digits(make_real(format_decimal(prev.p.vy, prev.digits), cmp_ctx),
                                            last.p.vy, cap),
                           agreement_digits(make_real(format_decimal(prev.p.T, prev.digits), cmp_ctx),
                                            last.p.T, cap)});
    } else {
        agreed = cfg.correct.digits - 14;
    }
    const int digits = std::max(17, agreed);

    const PrecisionCtx final_ctx(last.digits, 4 + last.digits); // arithmetic only
    BigReal t_star = scale_invariant_period(last.p.vx, last.p.vy, last.p.T, final_ctx);

    out.solution.id = candidate_id(cand);
    out.solution.vx = format_decimal(last.p.vx, digits);
    out.solution.vy = format_decimal(last.p.vy, digits);
    out.solution.T = format_decimal(last.p.T, digits);
    out.solution.T_star = format_decimal(t_star, digits);
    out.solution.agreed_digits = agreed;
    out.solution.provenance = cfg.provenance();
    return out;
}

int cmd_refine(const PipelineConfig &cfg)
{
    return run_command("refine", [&]() {
        cfg.validate();
        ensure_output_dir(cfg);
        const PrecisionCtx scan_ctx(cfg.scan.digits, cfg.scan.order);
        std::vector<Candidate> cands = read_candidates(cfg, scan_ctx);

        // Resume: completed per-candidate reports.
        std::map<std::string, json> done;
        if (cfg.resume && std::filesystem::exists(cfg.reports_path())) {
            std::ifstream in(cfg.reports_path());
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) {
                    continue;
                }
                json j = json::parse(line, nullptr, false);
                if (!j.is_discarded()) {
                    done[j.at("id").get<std::string>()] = j;
                }
            }
        } else if (!cfg.resume) {
            std::error_code ec;
            std::filesystem::remove(cfg.reports_path(), ec);
        }

        std::vector<Solution> solutions;
        int converged = 0;
        for (const auto &cand : cands) {
            const std::string id = candidate_id(cand);
            json rec;
            auto it = done.find(id);
            if (it != done.end()) {
                rec = it->second;
            } else {
                RefineOutcome ro = refine_candidate(cand, cfg);
                rec = json{{"id", id},
                           {"verdict", verdict_name(ro.verdict)},
                           {"iterations", ro.iterations}};
                if (ro.verdict == Verdict::Converged) {
                    rec["solution"] = json::parse(solution_to_json_line(ro.solution));
                }
                std::ofstream outf(cfg.reports_path(), std::ios::app);
                if (!outf) {
                    throw io_error("cannot append to " + cfg.reports_path());
                }
                outf << rec.dump() << "\n";
            }
            if (rec.contains("solution")) {
                solutions.push_back(solution_from_json_line(rec["solution"].dump()));
                ++converged;
            }
        }
        write_solutions(cfg.solutions_path(), solutions);
        int min_agreed = 0;
        for (const auto &s : solutions) {
            min_agreed = min_agreed == 0 ? s.agreed_digits : std::min(min_agreed, s.agreed_digits);
        }
        std::cout << "refine: candidates=" << cands.size() << " converged=" << converged
                  << " min_agreed_digits=" << min_agreed << "\n";
        return 0;
    });
}

int cmd_classify(const PipelineConfig &cfg)
{
    return run_command("classify", [&]() {
        cfg.validate();
        std::vector<Solution> sols = load_catalog_or_solutions(cfg);
        const PrecisionCtx ctx(cfg.classify.digits, cfg.classify.order);
        int updated = 0, inconclusive = 0;
        for (auto &s : sols) {
            if (s.classified) {
                continue;
            }
            SearchPoint p{make_real(s.vx, ctx), make_real(s.vy, ctx), make_real(s.T, ctx)};
            try {
                FreeWord w = word_from_syzygies(syzygy_sequence(p, ctx));
                s.word = w.letters;
                s.k = satellite_power(w);
            } catch (const degenerate_syzygy_error &) {
                s.word = "?";
                s.k = 0;
                ++inconclusive;
            }
            s.choreography = is_choreography(p, ctx);
            s.classified = true;
            ++updated;
        }
        write_solutions(cfg.catalog_path(), sols);
        std::cout << "classify: solutions=" << sols.size() << " updated=" << updated
                  << " inconclusive=" << inconclusive << "\n";
        return 0;
    });
}

int cmd_stability(const PipelineConfig &cfg)
{
    return run_command("stability", [&]() {
        cfg.validate();
        std::vector<Solution> sols = load_catalog_or_solutions(cfg);
        const PrecisionCtx ctx(cfg.classify.digits, cfg.classify.order);
        int updated = 0;
        for (auto &s : sols) {
            if (!s.stability.empty()) {
                continue;
            }
            SearchPoint p{make_real(s.vx, ctx), make_real(s.vy, ctx), make_real(s.T, ctx)};
            StabilityReport rep = classify_stability(p, ctx);
            s.stability = stability_name(rep.verdict);
            ++updated;
        }
        write_solutions(cfg.catalog_path(), sols);
        std::cout << "stability: solutions=" << sols.size() << " updated=" << updated << "\n";
        return 0;
    });
}

int cmd_dedup(const PipelineConfig &cfg)
{
    return run_command("dedup", [&]() {
        cfg.validate();
        std::vector<Solution> sols = load_catalog_or_solutions(cfg);
        int groups = dedup_solutions(sols);
        write_solutions(cfg.catalog_path(), sols);
        std::cout << "dedup: solutions=" << sols.size() << " groups=" << groups << "\n";
        return 0;
    });
}

int cmd_export_table(const PipelineConfig &cfg, const std::string &out_path)
{
    return run_command("export", [&]() {
        cfg.validate();
        std::vector<Solution> sols = load_catalog_or_solutions(cfg);
        std::vector<std::size_t> order(sols.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return parse_decimal(sols[a].T_star, 40) < parse_decimal(sols[b].T_star, 40);
        });
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) {
            throw io_error("cannot write " + out_path);
        }
        out << "id\tvx\tvy\tT\tT_star\tk\tword\tchoreography\tstability\tgroup\thead\tagreed_digits\n";
        for (std::size_t idx : order) {
            const Solution &s = sols[idx];
            out << s.id << "\t" << s.vx << "\t" << s.vy << "\t" << s.T << "\t" << s.T_star << "\t"
                << s.k << "\t" << s.word << "\t" << (s.choreography ? 1 : 0) << "\t" << s.stability
                << "\t" << s.dedup_group << "\t" << (s.group_head ? 1 : 0) << "\t"
                << s.agreed_digits << "\n";
        }
        std::cout << "export: rows=" << sols.size() << " -> " << out_path << "\n";
        return 0;
    });
}

int cmd_export_trajectory(const PipelineConfig &cfg, const std::string &solution_id,
                          const std::string &out_path)
{
    return run_command("export", [&]() {
        cfg.validate();
        std::vector<Solution> sols = load_catalog_or_solutions(cfg);
        const Solution *sol = nullptr;
        for (const auto &s : sols) {
            if (s.id == solution_id) {
                sol = &s;
            }
        }
        if (sol == nullptr) {
            throw std::invalid_argument("unknown solution id " + solution_id);
        }
        const PrecisionCtx ctx(cfg.classify.digits, cfg.classify.order);
        ScopedPrecision sp(ctx);
        SearchPoint p{make_real(sol->vx, ctx), make_real(sol->vy, ctx), make_real(sol->T, ctx)};
        const int n = cfg.export_stride;
        const int out_digits = std::min(25, ctx.decimal_digits);

        std::ofstream out(out_path, std::ios::trunc);
        if (!out) {
            throw io_error("cannot write " + out_path);
        }
        auto emit = [&](const BigReal &t, const State12 &u) {
            out << format_decimal(t, out_digits);
            for (int b = 0; b < 3; ++b) {
                out << " " << format_decimal(u.x(b), out_digits) << " "
                    << format_decimal(u.y(b), out_digits);
            }
            out << "\n";
        };
        const State12 u0 = initial_state(p, ctx);
        emit(BigReal(0), u0);
        int next_probe = 1;
        State12 final = integrate(u0, p.T, ctx, [&](const StepRecord &rec) {
            const BigReal t_end = rec.t_start + rec.h;
            while (next_probe < n) {
                BigReal tp = p.T * next_probe / n;
                if (tp > t_end) {
                    break;
                }
                emit(tp, dense_eval(rec, tp - rec.t_start));
                ++next_probe;
            }
        });
        emit(p.T, final);
        std::cout << "export: trajectory " << solution_id << " rows=" << (n + 1) << " -> "
                  << out_path << "\n";
        return 0;
    });
}

int cmd_run(const PipelineConfig &cfg)
{
    int rc = cmd_scan(cfg);
    if (rc == 0) {
        rc = cmd_refine(cfg);
    }
    if (rc == 0) {
        rc = cmd_classify(cfg);
    }
    if (rc == 0) {
        rc = cmd_stability(cfg);
    }
    if (rc == 0) {
        rc = cmd_dedup(cfg);
    }
    if (rc == 0) {
        rc = cmd_export_table(cfg, cfg.output_dir + "/table.tsv");
    }
    return rc;
}

VerifyOutcome verify_triplet(const std::string &vx, const std::string &vy, const std::string &T,
                             const std::vector<Regime> &regimes)
{
    VerifyOutcome out;
    if (regimes.empty()) {
        throw std::invalid_argument("verify: need at least one regime");
    }
    std::array<std::string, 3> prev{vx, vy, T};
    int prev_digits = 17;
    for (const auto &r : regimes) {
        const PrecisionCtx ctx(r.digits, r.order);
        CorrectorConfig cc;
        cc.mode = CorrectorMode::Classic;
        SearchPoint p{make_real(prev[0], ctx), make_real(prev[1], ctx), make_real(prev[2], ctx)};
        ConvergenceReport rep = correct(p, ctx, cc);
        if (rep.verdict != Verdict::Converged) {
            out.converged = false;
            return out;
        }
        std::array<std::string, 3> cur{format_decimal(rep.solution.vx, r.digits),
                                       format_decimal(rep.solution.vy, r.digits),
                                       format_decimal(rep.solution.T, r.digits)};
        if (out.triplets.size() >= 1) {
            const int cap = std::min(prev_digits, r.digits) - 2;
            const PrecisionCtx cmp = PrecisionCtx::for_digits(r.digits);
            out.agreed_digits = std::min({agreement_digits(make_real(prev[0], cmp),
                                                           make_real(cur[0], cmp), cap),
                                          agreement_digits(make_real(prev[1], cmp),
                                                           make_real(cur[1], cmp), cap),
                                          agreement_digits(make_real(prev[2], cmp),
                                                           make_real(cur[2], cmp), cap)});
        }
        out.triplets.push_back(cur);
        prev = cur;
        prev_digits = r.digits;
    }
    out.converged = true;
    return out;
}

} // namespace tbp
