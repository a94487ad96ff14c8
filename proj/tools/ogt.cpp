// Batch front door: validation, distances, folding runs, factor projections,
// flaring and bundle experiments, report rendering.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ogt/bundle.hpp"
#include "ogt/factors.hpp"
#include "ogt/flaring.hpp"
#include "ogt/folding.hpp"
#include "ogt/json_io.hpp"
#include "ogt/toml_lite.hpp"

using nlohmann::ordered_json;
using namespace ogt;

namespace {

std::string fmt_log(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

// Logs render at six decimals; parsing the fixed string back keeps the JSON
// value deterministic.
double fixed6(double x) { return std::stod(fmt_log(x)); }

std::uint64_t budget_ceiling() {
    if (const char* env = std::getenv("OGT_BUDGET")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            fail(ErrorCode::BadInput, "OGT_BUDGET is not an integer");
        }
    }
    return 50'000'000;
}

void emit(const ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) fail(ErrorCode::BadInput, "cannot write " + out_path);
        out << j.dump(2) << "\n";
    }
}

ordered_json log_scalar_json(const LogScalar& t) {
    ordered_json j;
    j["ratio"] = rational_to_string(t.ratio);
    j["log"] = fixed6(t.log_value());
    return j;
}

SubgroupSpec load_group(const std::string& path) {
    TomlTable toml = load_toml(path);
    int rank = static_cast<int>(toml.get_int("group.rank", 2));
    Basis basis(rank);
    std::vector<Automorphism> gens;
    std::vector<std::string> names;
    for (const auto& [key, value] : toml.values) {
        if (key.rfind("generators.", 0) != 0) continue;
        std::string text = value;
        for (char& c : text)
            if (c == ';') c = '\n';
        gens.push_back(parse_automorphism(text));
        names.push_back(key.substr(std::string("generators.").size()));
        if (!(gens.back().basis() == basis))
            fail(ErrorCode::BadInput, "generator rank mismatch in " + key);
    }
    if (gens.empty()) fail(ErrorCode::BadInput, "no [generators] entries in " + path);
    return SubgroupSpec::from_generators(std::move(gens), std::move(names));
}

ordered_json flaring_report_json(const FlaringReport& r) {
    ordered_json j;
    j["lambda"] = rational_to_string(r.lambda);
    j["M"] = r.M;
    j["word_radius"] = r.word_radius;
    j["alpha_budget"] = r.alpha_budget;
    j["verdict"] = r.holds_on_sample ? "holds-on-sample" : "counterexample";
    ordered_json census;
    census["pairs"] = r.pairs;
    census["alphas"] = r.alphas;
    census["checks"] = r.checks;
    j["census"] = census;
    if (r.counterexample) {
        ordered_json ce;
        ce["g1"] = r.counterexample->g1_text;
        ce["g2"] = r.counterexample->g2_text;
        ce["alpha"] = r.counterexample->alpha_text;
        ce["alpha_len"] = r.counterexample->alpha_len;
        ce["g1_alpha_len"] = r.counterexample->g1_image_len;
        ce["g2_inv_alpha_len"] = r.counterexample->g2_inv_image_len;
        j["witness"] = ce;
    }
    ordered_json growth = ordered_json::array();
    for (double g : r.generator_growth) growth.push_back(fixed6(g));
    j["generator_growth"] = growth;
    ordered_json consts;
    consts["m_breve"] = r.m_breve;
    consts["illegal_threshold"] = rational_to_string(r.illegal_threshold);
    consts["torsion_e_r"] = r.torsion_e_r.str();
    j["constants"] = consts;
    return j;
}

ordered_json bundle_report_json(const BundleReport& r) {
    ordered_json j;
    j["k"] = r.qi_class;
    j["n_k"] = r.n_k;
    j["M_k"] = r.M_k;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["min_lambda"] = rational_to_string(r.min_lambda);
    j["min_lambda_value"] = fixed6(to_double(r.min_lambda));
    j["lambda_target"] = fixed6(r.lambda_target);
    j["ball_complete"] = r.ball_complete;
    ordered_json wits = ordered_json::array();
    for (const auto& w : r.below_target) {
        ordered_json jw;
        jw["alpha"] = w.alpha_text;
        jw["central"] = w.central;
        jw["forward"] = w.forward;
        jw["backward"] = w.backward;
        jw["lambda"] = rational_to_string(w.lambda);
        wits.push_back(jw);
    }
    j["witnesses_below_target"] = wits;
    j["note"] = "canonical lifts only; non-canonical qi lifts are not sampled";
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"Outer space geometry toolkit"};
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "check a marked graph file");
    std::string validate_path;
    bool validate_normalize = false;
    validate->add_option("graph", validate_path)->required();
    validate->add_flag("--normalize", validate_normalize, "rescale to volume 1 before checking");

    // distance
    auto* distance = app.add_subcommand("distance", "asymmetric Lipschitz distance");
    std::string dist_g, dist_h, dist_out;
    distance->add_option("G", dist_g)->required();
    distance->add_option("H", dist_h)->required();
    distance->add_option("--out", dist_out);

    // candidates
    auto* cands = app.add_subcommand("candidates", "candidate classes of a graph");
    std::string cand_path, cand_out;
    cands->add_option("graph", cand_path)->required();
    cands->add_option("--out", cand_out);

    // fold
    auto* fold = app.add_subcommand("fold", "standard geodesic and folding event log");
    std::string fold_g, fold_h, fold_track, fold_out, fold_csv;
    int fold_cap = 10000;
    double fold_gap = 0;
    fold->add_option("G", fold_g)->required();
    fold->add_option("H", fold_h)->required();
    fold->add_option("--track", fold_track, "comma separated conjugacy classes");
    fold->add_option("--out", fold_out, "JSON lines event log");
    fold->add_option("--csv", fold_csv, "length-vs-time table");
    fold->add_option("--event-cap", fold_cap);
    fold->add_option("--flare-gap", fold_gap, "also probe flare ratios at this time gap");

    // project
    auto* project = app.add_subcommand("project", "free factors of proper subgraphs");
    std::string proj_path, proj_out;
    project->add_option("graph", proj_path)->required();
    project->add_option("--out", proj_out);

    // aut
    auto* aut = app.add_subcommand("aut", "automorphism utilities");
    aut->require_subcommand(1);
    auto* aut_invert = aut->add_subcommand("invert");
    auto* aut_compose = aut->add_subcommand("compose");
    auto* aut_apply = aut->add_subcommand("apply");
    auto* aut_equal = aut->add_subcommand("equal");
    auto* aut_abel = aut->add_subcommand("abel");
    std::string aut_a, aut_b, aut_word;
    aut_invert->add_option("file", aut_a)->required();
    aut_compose->add_option("f", aut_a)->required();
    aut_compose->add_option("g", aut_b)->required();
    aut_apply->add_option("file", aut_a)->required();
    aut_apply->add_option("word", aut_word)->required();
    aut_equal->add_option("f", aut_a)->required();
    aut_equal->add_option("g", aut_b)->required();
    aut_abel->add_option("file", aut_a)->required();

    // flare
    auto* flare = app.add_subcommand("flare", "subgroup flaring experiments");
    flare->require_subcommand(1);
    auto* flare_conj = flare->add_subcommand("conjugacy");
    std::string flare_group, flare_out, flare_lambda = "2";
    int flare_m = 1, flare_radius = 4, flare_alpha = 4;
    flare_conj->add_option("--group", flare_group)->required();
    flare_conj->add_option("--lambda", flare_lambda);
    flare_conj->add_option("--M", flare_m);
    flare_conj->add_option("--radius", flare_radius);
    flare_conj->add_option("--alpha-len", flare_alpha);
    flare_conj->add_option("--out", flare_out);
    auto* flare_screen = flare->add_subcommand("screen");
    std::string screen_aut;
    int screen_len = 4, screen_pow = 8;
    flare_screen->add_option("--aut", screen_aut)->required();
    flare_screen->add_option("--len-cap", screen_len);
    flare_screen->add_option("--pow-cap", screen_pow);
    auto* flare_growth = flare->add_subcommand("growth");
    std::string growth_aut, growth_alpha = "a";
    int growth_n = 12;
    flare_growth->add_option("--aut", growth_aut)->required();
    flare_growth->add_option("--alpha", growth_alpha);
    flare_growth->add_option("--n", growth_n);

    // bundle
    auto* bundle_cmd = app.add_subcommand("bundle", "Cayley graph bundle experiments");
    bundle_cmd->require_subcommand(1);
    auto* bundle_flare = bundle_cmd->add_subcommand("flare");
    std::string bundle_group, bundle_out, bundle_central;
    int bundle_k = 1, bundle_n = 2, bundle_m = 1, bundle_samples = 50;
    std::uint64_t bundle_seed = 7;
    double bundle_target = 1.0;
    bundle_flare->add_option("--group", bundle_group)->required();
    bundle_flare->add_option("--k", bundle_k);
    bundle_flare->add_option("--n", bundle_n);
    bundle_flare->add_option("--M", bundle_m);
    bundle_flare->add_option("--samples", bundle_samples);
    bundle_flare->add_option("--seed", bundle_seed);
    bundle_flare->add_option("--target", bundle_target);
    bundle_flare->add_option("--central", bundle_central, "comma separated central words");
    bundle_flare->add_option("--out", bundle_out);
    auto* bundle_consts = bundle_cmd->add_subcommand("constants");
    std::string consts_group, consts_lambda = "3";
    int consts_n = 1, consts_k = 1;
    bundle_consts->add_option("--group", consts_group)->required();
    bundle_consts->add_option("--lambda", consts_lambda);
    bundle_consts->add_option("--N", consts_n);
    bundle_consts->add_option("--k", consts_k);

    // report
    auto* report_cmd = app.add_subcommand("report", "summarize a report file");
    std::string report_path;
    report_cmd->add_option("file", report_path)->required();

    CLI11_PARSE(app, argc, argv);

    if (*validate) {
        MarkedGraph g = load_marked_graph(validate_path, validate_normalize);
        g.validate(true);
        ordered_json j;
        j["ok"] = true;
        j["rank"] = g.basis.rank;
        j["volume"] = rational_to_string(g.graph.volume());
        j["injectivity_radius"] = rational_to_string(injectivity_radius(g));
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (*distance) {
        MarkedGraph g = load_marked_graph(dist_g);
        MarkedGraph h = load_marked_graph(dist_h);
        auto fwd = lipschitz_distance(g, h);
        auto rev = lipschitz_distance(h, g);
        ordered_json j;
        j["ratio"] = rational_to_string(fwd.ratio);
        j["log"] = fixed6(std::log(to_double(fwd.ratio)));
        j["witness"] = cyclic_word_to_string(g.basis, fwd.witness);
        j["reverse_ratio"] = rational_to_string(rev.ratio);
        j["sym_ratio"] = rational_to_string(fwd.ratio * rev.ratio);
        emit(j, dist_out);
        return 0;
    }
    if (*cands) {
        MarkedGraph g = load_marked_graph(cand_path);
        ordered_json j;
        ordered_json list = ordered_json::array();
        for (const auto& c : candidates(g)) {
            ordered_json jc;
            jc["class"] = cyclic_word_to_string(g.basis, c);
            jc["length"] = rational_to_string(loop_length(c, g));
            list.push_back(jc);
        }
        j["candidates"] = list;
        j["injectivity_radius"] = rational_to_string(injectivity_radius(g));
        emit(j, cand_out);
        return 0;
    }
    if (*fold) {
        auto g = std::make_shared<MarkedGraph>(load_marked_graph(fold_g));
        auto h = std::make_shared<MarkedGraph>(load_marked_graph(fold_h));
        DifferenceOfMarkings opt = optimal_map(g, h);
        TenseResult tense = make_fully_tense(opt);
        FoldingPath path = fold_path(tense.map, fold_cap);

        std::vector<CyclicWord> tracked;
        std::stringstream ss(fold_track);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) tracked.push_back(CyclicWord(parse_word(g->basis, item)));

        std::ostringstream events;
        for (size_t i = 0; i < path.size(); ++i) {
            const auto& ev = path.at(i);
            ordered_json j;
            j["event"] = i;
            j["time"] = log_scalar_json(ev.time);
            j["m"] = ev.illegality;
            j["graph"] = marked_graph_to_json(*ev.graph);
            ordered_json tr;
            for (const auto& alpha : tracked) {
                auto rec = loop_profile_at(alpha, ev, g->basis.rank);
                ordered_json ja;
                ja["len"] = rational_to_string(rec.length);
                ja["k"] = rec.illegal_turns;
                ja["leg"] = rational_to_string(rec.leg);
                ja["ilg"] = rational_to_string(rec.ilg);
                ja["ntr"] = rational_to_string(rec.ntr);
                tr[cyclic_word_to_string(g->basis, alpha)] = ja;
            }
            j["tracked"] = tr;
            events << j.dump() << "\n";
        }
        if (fold_out.empty()) {
            std::cout << events.str();
        } else {
            std::ofstream out(fold_out);
            if (!out) fail(ErrorCode::BadInput, "cannot write " + fold_out);
            out << events.str();
        }
        if (!fold_csv.empty()) {
            std::ofstream csv(fold_csv);
            if (!csv) fail(ErrorCode::BadInput, "cannot write " + fold_csv);
            csv << "event,time,alpha,len,k,leg,ilg,ntr\n";
            for (size_t i = 0; i < path.size(); ++i) {
                const auto& ev = path.at(i);
                for (const auto& alpha : tracked) {
                    auto rec = loop_profile_at(alpha, ev, g->basis.rank);
                    csv << i << "," << fmt_log(std::log(to_double(ev.time.ratio))) << ","
                        << cyclic_word_to_string(g->basis, alpha) << ","
                        << rational_to_string(rec.length) << "," << rec.illegal_turns << ","
                        << rational_to_string(rec.leg) << "," << rational_to_string(rec.ilg)
                        << "," << rational_to_string(rec.ntr) << "\n";
                }
            }
        }
        ordered_json summary;
        summary["events"] = path.size();
        summary["rescale"] = log_scalar_json(tense.rescale_time);
        summary["fold_time"] = log_scalar_json(path.total_time());
        summary["distance_ratio"] = rational_to_string(lipschitz_distance(*g, *h).ratio);
        if (fold_gap > 0 && !tracked.empty()) {
            auto rows = folding_flare_probe(path, tracked, fold_gap, Rational(1, 4));
            ordered_json probe = ordered_json::array();
            for (const auto& row : rows) {
                ordered_json jr;
                jr["alpha"] = row.alpha_text;
                jr["min_ratio"] = rational_to_string(row.min_ratio);
                jr["longest_short_interval"] = fixed6(row.longest_short_interval);
                probe.push_back(jr);
            }
            summary["flare_probe"] = probe;
        }
        std::cerr << summary.dump(2) << "\n";
        return 0;
    }
    if (*project) {
        MarkedGraph g = load_marked_graph(proj_path);
        ordered_json j;
        ordered_json list = ordered_json::array();
        for (const auto& f : project_factors(g)) {
            ordered_json jf;
            ordered_json gens = ordered_json::array();
            for (const auto& w : f.generators) gens.push_back(word_to_string(g.basis, w));
            jf["generators"] = gens;
            jf["rank"] = f.rank();
            char hex[32];
            std::snprintf(hex, sizeof(hex), "%016llx",
                          static_cast<unsigned long long>(canonical_hash(f.core)));
            jf["stallings_hash"] = hex;
            list.push_back(jf);
        }
        j["factors"] = list;
        emit(j, proj_out);
        return 0;
    }
    if (*aut) {
        if (*aut_invert) {
            std::cout << automorphism_to_text(parse_automorphism_file(aut_a).inverse());
            return 0;
        }
        if (*aut_compose) {
            auto f = parse_automorphism_file(aut_a);
            auto g2 = parse_automorphism_file(aut_b);
            std::cout << automorphism_to_text(compose(f, g2));
            return 0;
        }
        if (*aut_apply) {
            auto f = parse_automorphism_file(aut_a);
            std::cout << word_to_string(f.basis(), f.apply(parse_word(f.basis(), aut_word)))
                      << "\n";
            return 0;
        }
        if (*aut_equal) {
            auto f = parse_automorphism_file(aut_a);
            auto g2 = parse_automorphism_file(aut_b);
            auto r = out_equal(f, g2);
            ordered_json j;
            j["equal"] = r.equal;
            if (r.conjugator) j["conjugator"] = word_to_string(f.basis(), *r.conjugator);
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*aut_abel) {
            auto f = parse_automorphism_file(aut_a);
            auto m = abelianize(f);
            ordered_json j;
            j["matrix"] = m.to_string();
            j["det"] = m.determinant().str();
            j["unimodular"] = (m.determinant() == 1 || m.determinant() == -1);
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    }
    if (*flare) {
        if (*flare_conj) {
            SubgroupSpec group = load_group(flare_group);
            auto report = conjugacy_flaring_check(group, parse_rational(flare_lambda), flare_m,
                                                  flare_radius, flare_alpha, budget_ceiling());
            emit(flaring_report_json(report), flare_out);
            return 0;
        }
        if (*flare_screen) {
            auto f = parse_automorphism_file(screen_aut);
            auto verdict = screen_atoroidal(f, screen_len, screen_pow);
            ordered_json j;
            j["banner"] = "NON-CERTIFYING heuristic screen";
            j["len_cap"] = verdict.len_cap;
            j["pow_cap"] = verdict.pow_cap;
            j["degenerate"] = verdict.degenerate;
            j["pruned_orbits"] = verdict.pruned;
            if (verdict.periodic) {
                j["verdict"] = "periodic-class-found";
                j["class"] = verdict.periodic->first;
                j["period"] = verdict.periodic->second;
            } else {
                j["verdict"] = "no-short-periodic-class";
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*flare_growth) {
            auto f = parse_automorphism_file(growth_aut);
            auto fit = growth_fit(f, CyclicWord(parse_word(f.basis(), growth_alpha)), growth_n);
            ordered_json j;
            j["exponent"] = fixed6(fit.exponent);
            j["min_stretch"] = rational_to_string(fit.min_stretch);
            j["max_stretch"] = rational_to_string(fit.max_stretch);
            ordered_json lens = ordered_json::array();
            for (int l : fit.lengths) lens.push_back(l);
            j["lengths"] = lens;
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    }
    if (*bundle_cmd) {
        if (*bundle_flare) {
            SubgroupSpec group = load_group(bundle_group);
            BundleSpec spec = BundleSpec::from_group(group);
            std::vector<Word> central;
            std::stringstream ss(bundle_central);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) central.push_back(parse_word(group.basis, item));
            auto report = mj_sardar_sampler(spec, bundle_k, bundle_n, bundle_m, bundle_samples,
                                            bundle_seed, bundle_target, central);
            emit(bundle_report_json(report), bundle_out);
            return 0;
        }
        if (*bundle_consts) {
            SubgroupSpec group = load_group(consts_group);
            BundleSpec spec = BundleSpec::from_group(group);
            auto c = prop81_constants(parse_rational(consts_lambda), consts_n, consts_k, spec,
                                      budget_ceiling());
            ordered_json j;
            j["lambda_k"] = rational_to_string(c.lambda_k);
            j["n_k"] = c.n_k;
            j["M_k"] = c.M_k.str();
            j["e_k"] = c.e_k;
            ordered_json f = ordered_json::array();
            for (int v : c.properness) f.push_back(v);
            j["properness"] = f;
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    }
    if (*report_cmd) {
        std::ifstream in(report_path);
        if (!in) fail(ErrorCode::BadInput, "cannot open " + report_path);
        ordered_json j = ordered_json::parse(in, nullptr, true, true);
        if (j.contains("verdict"))
            std::cout << "verdict: " << j["verdict"].get<std::string>() << "\n";
        if (j.contains("witness")) std::cout << "witness: " << j["witness"].dump() << "\n";
        if (j.contains("min_lambda"))
            std::cout << "min lambda: " << j["min_lambda"].get<std::string>() << "\n";
        if (j.contains("census")) std::cout << "census: " << j["census"].dump() << "\n";
        if (j.contains("ratio")) std::cout << "ratio: " << j["ratio"].get<std::string>() << "\n";
        return 0;
    }
    return 64;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        ordered_json j;
        j["error"] = error_code_name(e.code());
        j["message"] = e.what();
        std::cout << j.dump(2) << "\n";
        return e.is_budget() ? 2 : 1;
    } catch (const std::exception& e) {
        ordered_json j;
        j["error"] = "Internal";
        j["message"] = e.what();
        std::cout << j.dump(2) << "\n";
        return 1;
    }
}
