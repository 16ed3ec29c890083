// toepsq: build the square/Toeplitz sequence tower, evaluate it, run the
// verification suites, and reproduce the weighted averages.
//
// Exit codes: 0 pass, 1 runtime failure (including a failed verification),
// 2 invalid input.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <toepsq/toepsq.hpp>

using namespace toepsq;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

struct ScheduleSource {
    std::string file;
    std::string epsilon0;
    int stages = 5;
};

void add_schedule_options(CLI::App* cmd, ScheduleSource& src) {
    auto* file = cmd->add_option("--schedule", src.file, "schedule file to load");
    auto* eps = cmd->add_option("--epsilon0", src.epsilon0,
                                "epsilon_0 as a rational (e.g. 1/2) to generate a schedule");
    cmd->add_option("--stages", src.stages, "M_max when generating (default 5)");
    file->excludes(eps);
}

ParamSchedule resolve_schedule(const ScheduleSource& src) {
    if (!src.file.empty()) {
        std::ifstream in(src.file);
        if (!in) throw domain_error("cannot open schedule file '" + src.file + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        ParamSchedule s = parse_schedule(buf.str());
        auto violations = validate_schedule(s);
        if (!violations.empty())
            throw domain_error("schedule file violates constraint at stage " +
                               std::to_string(violations.front().index) + ": " +
                               violations.front().constraint);
        return s;
    }
    if (src.epsilon0.empty())
        throw domain_error("no schedule source: pass --schedule FILE or --epsilon0 E");
    return generate_schedule(Rational::parse(src.epsilon0), src.stages);
}

std::pair<SeqIndex, SeqIndex> parse_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw domain_error("range must be LO:HI, got '" + text + "'");
    SeqIndex lo = parse_seq_index(text.substr(0, colon));
    SeqIndex hi = parse_seq_index(text.substr(colon + 1));
    if (lo > hi) throw domain_error("range is empty: " + text);
    return {lo, hi};
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw error("write failed for '" + path + "'");
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_text(out_path, content);
}

std::uint64_t sieve_limit_for(std::uint64_t needed, std::uint64_t requested) {
    if (requested != 0) {
        if (requested < needed)
            throw domain_error("--sieve-limit " + std::to_string(requested) +
                               " is below the required " + std::to_string(needed));
        return requested;
    }
    return std::max<std::uint64_t>(needed, std::uint64_t(1) << 20);
}

// --- schedule ----------------------------------------------------------

int run_schedule(const ScheduleSource& src, const std::string& out_path) {
    ParamSchedule s = resolve_schedule(src);
    std::string table;
    table += "i,epsilon,n_i,l_i,K_i\n";
    for (int i = 0; i <= s.m_max; ++i) {
        table += std::to_string(i) + "," + s.epsilon(i).str() + "," +
                 std::to_string(s.exponents[i]) + "," + to_string(s.length(i)) + ",";
        table += i >= 1 ? to_string(k_bound(s, i)) : "";
        table += "\n";
    }
    std::cout << table;
    if (!out_path.empty()) {
        write_text(out_path, serialize_schedule(s));
        std::cout << "schedule written to " << out_path << "\n";
    }
    return kExitPass;
}

// --- eval ----------------------------------------------------------------

int run_eval(const ScheduleSource& src, const std::vector<std::string>& indices,
             const std::string& range, int stage, std::uint64_t sieve_limit,
             const std::string& out_path) {
    ParamSchedule s = resolve_schedule(src);
    if (indices.empty() && range.empty())
        throw domain_error("eval: pass --n INDEX... or --range LO:HI");

    std::vector<SeqIndex> points;
    for (const std::string& t : indices) points.push_back(parse_seq_index(t));
    std::optional<std::pair<SeqIndex, SeqIndex>> span;
    if (!range.empty()) span = parse_range(range);

    SeqIndex max_abs = 0;
    for (SeqIndex p : points) max_abs = std::max(max_abs, seq_abs(p));
    if (span) max_abs = std::max({max_abs, seq_abs(span->first), seq_abs(span->second)});
    if (max_abs >= s.length(s.m_max))
        throw domain_error("eval: |n| = " + to_string(max_abs) +
                           " is at or beyond schedule reach l_{M_max} = 2^" +
                           std::to_string(s.exponents[s.m_max]));

    // cover sqrt of the largest index that could reach the base, capped; a
    // square beyond the cap surfaces as a range error telling the user to
    // raise --sieve-limit
    std::uint64_t limit = sieve_limit;
    if (limit == 0) {
        std::uint64_t needed = std::uint64_t(isqrt(USeqIndex(max_abs))) + 1;
        limit = std::clamp<std::uint64_t>(needed, std::uint64_t(1) << 20, std::uint64_t(1) << 26);
    }
    auto sieve = MobiusSieve::build(limit);
    WeightFunction mu = WeightFunction::mobius(sieve);

    auto value_at = [&](SeqIndex n) {
        return stage < 0 ? limit_value(s, mu, n) : stage_value(s, mu, stage, n);
    };
    std::string csv = "n,value\n";
    for (SeqIndex p : points) csv += to_string(p) + "," + std::to_string(int(value_at(p))) + "\n";
    if (span)
        for (SeqIndex n = span->first; n <= span->second; ++n)
            csv += to_string(n) + "," + std::to_string(int(value_at(n))) + "\n";
    emit(out_path, csv);
    return kExitPass;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
    ScheduleSource src;
    int m = 3;
    unsigned n_max = 16;
    std::string range = "-100000:100000";
    SeqIndex i_max = 10000;
    SeqIndex t_min = -50, t_max = 50;
    std::uint64_t n_terms = 1'000'000;
    std::uint64_t sieve_limit = 0;
    int threads = 1;
    bool long_mode = false;
    std::string out_path;
};

int finish_verify(const std::string& suite, bool pass, const std::string& report,
                  const VerifyArgs& args) {
    if (!args.out_path.empty()) write_text(args.out_path, report);
    std::cout << report;
    std::cout << (pass ? "PASS" : "FAIL") << " verify " << suite << "\n";
    return pass ? kExitPass : kExitRuntime;
}

int verify_residues(const VerifyArgs& args) {
    auto rep = verify_residue_lemma(args.n_max);
    std::string report;
    report += "suite = residues\n";
    report += "n_max = " + std::to_string(rep.n_max) + "\n";
    report += "classes_checked = " + std::to_string(rep.classes_checked) + "\n";
    report += "pass = " + std::string(rep.pass ? "1" : "0") + "\n";
    if (!rep.pass) report += "first_failure = " + rep.first_failure + "\n";
    return finish_verify("residues", rep.pass, report, args);
}

int verify_oracle(const VerifyArgs& args) {
    ParamSchedule s = resolve_schedule(args.src);
    auto [lo, hi] = parse_range(args.range);
    std::uint64_t needed = std::uint64_t(isqrt(USeqIndex(std::max(seq_abs(lo), seq_abs(hi))))) + 1;
    auto sieve = MobiusSieve::build(sieve_limit_for(needed, args.sieve_limit));
    WeightFunction mu = WeightFunction::mobius(sieve);
    std::string report = "suite = oracle\nrange = " + to_string(lo) + ":" + to_string(hi) + "\n";
    bool pass = true;
    for (int stage = 1; stage <= args.m && pass; ++stage) {
        auto arr = materialize_stage_bruteforce(s, mu, stage, lo, hi);
        std::uint64_t mismatches = 0;
        SeqIndex first_bad = 0;
        for (SeqIndex n = lo; n <= hi; ++n) {
            if (arr[std::size_t(n - lo)] != stage_value(s, mu, stage, n)) {
                if (mismatches == 0) first_bad = n;
                ++mismatches;
            }
        }
        report += "stage_" + std::to_string(stage) + "_mismatches = " +
                  std::to_string(mismatches) + "\n";
        if (mismatches > 0) {
            pass = false;
            report += "first_mismatch_n = " + to_string(first_bad) + "\n";
            report += "evaluator_value = " +
                      std::to_string(int(stage_value(s, mu, stage, first_bad))) + "\n";
            report += "oracle_value = " +
                      std::to_string(int(arr[std::size_t(first_bad - lo)])) + "\n";
            report += "trace = " + reduction_trace(s, mu, stage, first_bad) + "\n";
        }
    }
    report += "pass = " + std::string(pass ? "1" : "0") + "\n";
    return finish_verify("oracle", pass, report, args);
}

int verify_toeplitz(const VerifyArgs& args) {
    ParamSchedule s = resolve_schedule(args.src);
    std::uint64_t needed = std::uint64_t(isqrt(USeqIndex(seq_abs(args.i_max)))) + 1;
    auto sieve = MobiusSieve::build(sieve_limit_for(needed, args.sieve_limit));
    WeightFunction mu = WeightFunction::mobius(sieve);
    auto rep = toeplitz_recurrence_check(s, mu, args.i_max, args.t_min, args.t_max, args.threads);
    std::string report = "suite = toeplitz\n";
    report += recurrence_csv_header() + "\n" + recurrence_csv_row(rep) + "\n";
    if (!rep.pass) {
        SeqIndex bad = rep.first_fail_i + rep.first_fail_t * recurrence_period(s, rep.first_fail_i);
        int stage = 0;
        while (s.length(stage) <= seq_abs(bad)) ++stage;
        report += "trace = " + reduction_trace(s, mu, stage, bad) + "\n";
    }
    return finish_verify("toeplitz", rep.pass, report, args);
}

int verify_discrepancy(const VerifyArgs& args) {
    ParamSchedule s = resolve_schedule(args.src);
    SeqIndex k_limit = k_bound(s, args.m);
    if (k_limit > (SeqIndex(1) << 22) && !args.long_mode)
        throw domain_error("discrepancy at M=" + std::to_string(args.m) + " enumerates K_M = " +
                           to_string(k_limit) + " squares; pass --long to run it");
    if (k_limit > (SeqIndex(1) << 22))
        std::cerr << "running discrepancy M=" << args.m << " over K_M = " << to_string(k_limit)
                  << " membership tests...\n";
    std::uint64_t needed = std::uint64_t(k_limit) + 1;
    auto sieve = MobiusSieve::build(sieve_limit_for(needed, args.sieve_limit));
    WeightFunction mu = WeightFunction::mobius(sieve);
    auto rep = discrepancy_ratio(s, mu, args.m, args.threads);
    std::string report = discrepancy_csv_header() + "\n" + discrepancy_csv_row(rep) + "\n";
    return finish_verify("discrepancy", rep.pass, report, args);
}

int verify_distance(const VerifyArgs& args) {
    ParamSchedule s = resolve_schedule(args.src);
    std::uint64_t needed = std::uint64_t(isqrt(USeqIndex(args.n_terms))) + 1;
    auto sieve = MobiusSieve::build(sieve_limit_for(needed, args.sieve_limit));
    WeightFunction mu = WeightFunction::mobius(sieve);
    std::string report = distance_csv_header() + "\n";
    bool pass = true;
    for (int m = 1; m <= args.m; ++m) {
        for (std::uint64_t n : {std::uint64_t(1000), std::uint64_t(10000), std::uint64_t(100000),
                                std::uint64_t(1'000'000)}) {
            if (n > args.n_terms) continue;
            auto rep = stage_distance(s, mu, m, n, args.threads);
            report += distance_csv_row(rep) + "\n";
            pass = pass && rep.pass;
        }
    }
    return finish_verify("distance", pass, report, args);
}

int verify_decomposition(const VerifyArgs& args) {
    ParamSchedule s = resolve_schedule(args.src);
    auto [lo, hi] = parse_range(args.range);
    std::uint64_t needed = std::uint64_t(isqrt(USeqIndex(std::max(seq_abs(lo), seq_abs(hi))))) + 1;
    auto sieve = MobiusSieve::build(sieve_limit_for(needed, args.sieve_limit));
    WeightFunction mu = WeightFunction::mobius(sieve);
    std::string report = "suite = decomposition\nrange = " + to_string(lo) + ":" + to_string(hi) +
                         "\nM = " + std::to_string(args.m) + "\n";
    std::uint64_t mismatches = 0;
    SeqIndex first_bad = 0;
    for (SeqIndex n = lo; n <= hi; ++n) {
        int sum = 0;
        for (int m = 0; m <= args.m; ++m) sum += component_value(s, mu, m, args.m, n);
        if (sum != stage_value(s, mu, args.m, n)) {
            if (mismatches == 0) first_bad = n;
            ++mismatches;
        }
    }
    bool pass = mismatches == 0;
    report += "mismatches = " + std::to_string(mismatches) + "\n";
    if (!pass) {
        report += "first_mismatch_n = " + to_string(first_bad) + "\n";
        report += "trace = " + reduction_trace(s, mu, args.m, first_bad) + "\n";
    }
    report += "pass = " + std::string(pass ? "1" : "0") + "\n";
    return finish_verify("decomposition", pass, report, args);
}

// --- average ----------------------------------------------------------------

int run_average(const ScheduleSource& src, std::vector<std::uint64_t> n_list,
                const std::vector<int>& km_list, const std::string& weight_name,
                std::uint64_t sieve_limit, int threads, bool long_mode,
                const std::string& out_path) {
    ParamSchedule s = resolve_schedule(src);
    for (int m : km_list) {
        SeqIndex k = k_bound(s, m);
        if (USeqIndex(k) > USeqIndex(~std::uint64_t(0)))
            throw domain_error("average: K_" + std::to_string(m) + " does not fit 64 bits");
        n_list.push_back(std::uint64_t(k));
    }
    if (n_list.empty()) throw domain_error("average: pass --N COUNT... or --at-KM M...");
    std::uint64_t n_max = 0;
    for (std::uint64_t n : n_list) n_max = std::max(n_max, n);
    if (n_max > (std::uint64_t(1) << 22) && !long_mode)
        throw domain_error("average at N=" + std::to_string(n_max) +
                           " is a long-running reproduction; pass --long to run it");
    detail::check_square_capacity(s, n_max, "average");

    auto sieve = MobiusSieve::build(sieve_limit_for(n_max, sieve_limit));
    WeightFunction weight = WeightFunction::preset(weight_name, sieve, n_max);

    std::string csv = average_csv_header() + "\n";
    for (std::uint64_t n : n_list) {
        if (n_max > (std::uint64_t(1) << 22))
            std::cerr << "averaging N=" << n << " (" << weight_name << ")...\n";
        csv += average_csv_row(compute_average_report(s, sieve, weight, n, threads)) + "\n";
    }
    emit(out_path, csv);
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"square/Toeplitz sequence tower: construction, verification, averages"};
    app.require_subcommand(1);

    // schedule
    auto* sched_cmd = app.add_subcommand("schedule", "generate a parameter tower and print l_i, K_i");
    ScheduleSource sched_src;
    add_schedule_options(sched_cmd, sched_src);
    std::string sched_out;
    sched_cmd->add_option("--out", sched_out, "write the schedule file here");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate b_n (or a^(M)_n with --stage)");
    ScheduleSource eval_src;
    add_schedule_options(eval_cmd, eval_src);
    std::vector<std::string> eval_points;
    std::string eval_range, eval_out;
    int eval_stage = -1;
    std::uint64_t eval_sieve = 0;
    eval_cmd->add_option("--n", eval_points, "indices to evaluate");
    eval_cmd->add_option("--range", eval_range, "inclusive index range LO:HI");
    eval_cmd->add_option("--stage", eval_stage, "evaluate a^(M) instead of the limit b");
    eval_cmd->add_option("--sieve-limit", eval_sieve, "Möbius table limit override");
    eval_cmd->add_option("--out", eval_out, "write CSV here instead of stdout");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    VerifyArgs vargs;
    std::string suite;
    verify_cmd->add_option("suite", suite, "residues | oracle | toeplitz | discrepancy | distance | decomposition")
        ->required();
    add_schedule_options(verify_cmd, vargs.src);
    verify_cmd->add_option("--M", vargs.m, "stage parameter of the suite");
    verify_cmd->add_option("--nmax", vargs.n_max, "residues: exhaustive modulus exponent bound");
    verify_cmd->add_option("--range", vargs.range, "oracle/decomposition: index range LO:HI");
    std::string imax_text = "10000", tmin_text = "-50", tmax_text = "50";
    verify_cmd->add_option("--imax", imax_text, "toeplitz: check |i| <= imax");
    verify_cmd->add_option("--tmin", tmin_text, "toeplitz: lattice steps from");
    verify_cmd->add_option("--tmax", tmax_text, "toeplitz: lattice steps to");
    verify_cmd->add_option("--N", vargs.n_terms, "distance: largest average length");
    verify_cmd->add_option("--sieve-limit", vargs.sieve_limit, "Möbius table limit override");
    verify_cmd->add_option("--threads", vargs.threads, "parallelism degree");
    verify_cmd->add_flag("--long", vargs.long_mode, "allow long-running suites");
    verify_cmd->add_option("--out", vargs.out_path, "write the detail report here");

    // average
    auto* avg_cmd = app.add_subcommand("average", "compute S1/S2/baseline rows");
    ScheduleSource avg_src;
    add_schedule_options(avg_cmd, avg_src);
    std::vector<std::uint64_t> avg_n;
    std::vector<int> avg_km;
    std::string avg_weight = "mobius", avg_out;
    std::uint64_t avg_sieve = 0;
    int avg_threads = 1;
    bool avg_long = false;
    avg_cmd->add_option("--N", avg_n, "average lengths");
    avg_cmd->add_option("--at-KM", avg_km, "average at the checkpoint lengths K_M");
    avg_cmd->add_option("--weight", avg_weight, "mobius | liouville | unit");
    avg_cmd->add_option("--sieve-limit", avg_sieve, "Möbius table limit override");
    avg_cmd->add_option("--threads", avg_threads, "parallelism degree");
    avg_cmd->add_flag("--long", avg_long, "allow K_4-scale runs");
    avg_cmd->add_option("--out", avg_out, "write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitInvalid;
    }

    try {
        if (*sched_cmd) return run_schedule(sched_src, sched_out);
        if (*eval_cmd)
            return run_eval(eval_src, eval_points, eval_range, eval_stage, eval_sieve, eval_out);
        if (*verify_cmd) {
            vargs.i_max = parse_seq_index(imax_text);
            vargs.t_min = parse_seq_index(tmin_text);
            vargs.t_max = parse_seq_index(tmax_text);
            if (suite == "residues") return verify_residues(vargs);
            if (suite == "oracle") return verify_oracle(vargs);
            if (suite == "toeplitz") return verify_toeplitz(vargs);
            if (suite == "discrepancy") return verify_discrepancy(vargs);
            if (suite == "distance") return verify_distance(vargs);
            if (suite == "decomposition") return verify_decomposition(vargs);
            throw domain_error("unknown verify suite '" + suite + "'");
        }
        if (*avg_cmd)
            return run_average(avg_src, avg_n, avg_km, avg_weight, avg_sieve, avg_threads,
                               avg_long, avg_out);
        throw domain_error("no subcommand given");
    } catch (const domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitPass;
}
