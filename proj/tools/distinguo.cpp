// distinguo: counts formula realizations on finite and periodic structures,
// tests pairs for equal-count equivalence, isomorphism, and game equivalence,
// classifies whole directories, and cross-checks the injection-witness
// membership test against the count-based verdict.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "distinguo/borel.hpp"
#include "distinguo/equivalence.hpp"
#include "distinguo/errors.hpp"
#include "distinguo/fragment.hpp"
#include "distinguo/io.hpp"
#include "distinguo/parser.hpp"
#include "distinguo/semantics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace distinguo;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::int64_t ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Structure load_structure(const std::string& path) {
    try {
        return parse_structure_doc(read_file(path));
    } catch (const SyntaxError& e) {
        throw Error(path + ": " + e.what());
    }
}

SearchLimits limits_from_env() {
    SearchLimits limits;
    if (const char* raw = std::getenv("DISTINGUO_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(raw, &end, 10);
        if (end == raw || *end != '\0' || v == 0)
            throw Error("DISTINGUO_BUDGET must be a positive integer");
        limits.max_nodes = v;
    }
    return limits;
}

json count_json(const Count& c) {
    if (c.is_infinite()) return json("inf");
    return json{{"fin", c.value()}};
}

std::string tuple_str(const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

// The formula set for a pair command: an explicit file or a generated
// fragment, never both.
FormulaSet resolve_formula_set(const Signature& sig,
                               const std::string& a_file,
                               const std::string& fragment_spec,
                               std::uint64_t max_fragment) {
    if (!a_file.empty() && !fragment_spec.empty())
        throw Error("pass either a formula file or --fragment, not both");
    if (!a_file.empty())
        return FormulaSet(sig, parse_formula_lines(read_file(a_file), sig));
    if (!fragment_spec.empty()) {
        std::size_t comma = fragment_spec.find(',');
        if (comma == std::string::npos)
            throw Error("--fragment wants RANK,VARS");
        Nat rank = 0, vars = 0;
        try {
            rank = static_cast<Nat>(std::stoul(fragment_spec.substr(0, comma)));
            vars = static_cast<Nat>(std::stoul(fragment_spec.substr(comma + 1)));
        } catch (const std::exception&) {
            throw Error("--fragment wants RANK,VARS");
        }
        FragmentOptions opts;
        if (max_fragment != 0) opts.budget = max_fragment;
        return generate_fragment(sig, rank, vars, opts);
    }
    throw Error("a formula set is required: pass an A-file or --fragment RANK,VARS");
}

// ---------------------------------------------------------------- count ----

int run_count(const std::string& structure_file, const std::string& formula_text,
              bool as_json, bool show_set) {
    Timer timer;
    Structure m = load_structure(structure_file);
    Formula f = parse(formula_text, m.signature());
    RealizationSet r = realizations(m, f);
    Count c = r.cardinality();

    bool list_tuples =
        c.is_finite() && (show_set || c.value() <= 20);

    if (as_json) {
        json out{{"command", "count"},
                 {"structure", structure_file},
                 {"formula", f.str()},
                 {"count", count_json(c)}};
        if (list_tuples) {
            json tuples = json::array();
            for (const Tuple& t : r.tuples()) tuples.push_back(t);
            out["realizations"] = tuples;
        }
        if (r.representation() == RealizationRep::PeriodicUnary)
            out["members"] = r.periodic_set().str();
        out["time_ms"] = timer.ms();
        std::cout << out.dump() << "\n";
        return 0;
    }

    std::cout << "command: count\n"
              << "structure: " << structure_file << "\n"
              << "formula: " << f.str() << "\n"
              << "count: " << c.str() << "\n";
    if (list_tuples) {
        std::cout << "realizations:";
        for (const Tuple& t : r.tuples()) std::cout << " " << tuple_str(t);
        std::cout << "\n";
    }
    if (r.representation() == RealizationRep::PeriodicUnary)
        std::cout << "members: " << r.periodic_set().str() << "\n";
    std::cout << "time_ms: " << timer.ms() << "\n";
    return 0;
}

// ---------------------------------------------------------- distinguish ----

int run_distinguish(const std::string& first_file, const std::string& second_file,
                    const std::string& a_file, const std::string& fragment_spec,
                    std::uint64_t max_fragment, bool as_json) {
    Timer timer;
    Structure m = load_structure(first_file);
    Structure n = load_structure(second_file);
    FormulaSet a =
        resolve_formula_set(m.signature(), a_file, fragment_spec, max_fragment);

    std::optional<DistinguishWitness> w = distinguishable(m, n, a);
    bool split = w.has_value();

    if (as_json) {
        json out{{"command", "distinguish"},
                 {"first", first_file},
                 {"second", second_file},
                 {"formulas", a.size()},
                 {"verdict", split ? "distinguishable" : "equivalent"}};
        if (split)
            out["witness"] = json{{"formula", w->formula.str()},
                                  {"first", count_json(w->count_first)},
                                  {"second", count_json(w->count_second)}};
        else
            out["witness"] = nullptr;
        out["time_ms"] = timer.ms();
        std::cout << out.dump() << "\n";
        return split ? 1 : 0;
    }

    std::cout << "command: distinguish\n"
              << "first: " << first_file << "\n"
              << "second: " << second_file << "\n"
              << "formulas: " << a.size() << "\n"
              << "verdict: " << (split ? "distinguishable" : "equivalent") << "\n";
    if (split)
        std::cout << "formula: " << w->formula.str() << "\n"
                  << "count_first: " << w->count_first.str() << "\n"
                  << "count_second: " << w->count_second.str() << "\n";
    std::cout << "time_ms: " << timer.ms() << "\n";
    return split ? 1 : 0;
}

// -------------------------------------------------------------- classify ----

// Count vectors computed per structure, optionally across threads; buckets in
// first-appearance order of the vectors, matching the library's grouping.
Classification classify_ea_parallel(const std::vector<Structure>& structures,
                                    const FormulaSet& a, unsigned threads) {
    std::vector<std::vector<Count>> vectors(structures.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= structures.size()) return;
            std::vector<Count> v;
            v.reserve(a.size());
            for (std::size_t k = 0; k < a.size(); ++k)
                v.push_back(count(structures[i], a[k]));
            vectors[i] = std::move(v);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    Classification result;
    std::map<std::string, std::size_t> seen;  // serialized vector -> class
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        std::string key;
        for (const Count& c : vectors[i]) key += c.str() + ";";
        auto [it, fresh] = seen.emplace(key, result.classes.size());
        if (fresh) result.classes.emplace_back();
        result.classes[it->second].push_back(i);
    }
    // Classes already follow smallest members since inputs are scanned in order.
    return result;
}

int run_classify(const std::string& dir, const std::string& a_file,
                 const std::string& fragment_spec, std::uint64_t max_fragment,
                 bool iso, int ef_rank, bool as_json, bool parallel) {
    Timer timer;

    std::vector<std::string> files;
    for (const fs::directory_entry& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no structure files in " + dir);

    std::vector<Structure> structures;
    structures.reserve(files.size());
    for (const std::string& f : files) structures.push_back(load_structure(f));

    bool want_ea = !a_file.empty() || !fragment_spec.empty();
    int modes = static_cast<int>(want_ea) + static_cast<int>(iso) +
                static_cast<int>(ef_rank >= 0);
    if (modes != 1)
        throw Error("pick exactly one mode: --ea FILE or --fragment RANK,VARS, "
                    "--iso, or --ef-rank Q");

    SearchLimits limits = limits_from_env();
    std::string relation;
    Classification cls;
    if (want_ea) {
        FormulaSet a = resolve_formula_set(structures[0].signature(), a_file,
                                           fragment_spec, max_fragment);
        relation = "E_A";
        unsigned threads =
            parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
        cls = threads > 1 ? classify_ea_parallel(structures, a, threads)
                          : classify_ea(structures, a);
    } else if (iso) {
        relation = "isomorphism";
        cls = classify_iso(structures, limits);
    } else {
        relation = "ef_rank_" + std::to_string(ef_rank);
        cls = classify_ef(structures, static_cast<Nat>(ef_rank), limits);
    }

    if (as_json) {
        json classes = json::array();
        for (const auto& members : cls.classes) {
            json names = json::array();
            for (std::size_t i : members) names.push_back(files[i]);
            classes.push_back(names);
        }
        json out{{"command", "classify"},    {"directory", dir},
                 {"structures", files.size()}, {"relation", relation},
                 {"class_count", cls.classes.size()}, {"classes", classes},
                 {"time_ms", timer.ms()}};
        std::cout << out.dump() << "\n";
        return 0;
    }

    std::cout << "command: classify\n"
              << "directory: " << dir << "\n"
              << "structures: " << files.size() << "\n"
              << "relation: " << relation << "\n"
              << "classes: " << cls.classes.size() << "\n";
    for (std::size_t c = 0; c < cls.classes.size(); ++c) {
        std::cout << "class " << c << ": size " << cls.classes[c].size()
                  << ", members";
        for (std::size_t i : cls.classes[c]) std::cout << " " << files[i];
        std::cout << "\n";
    }
    std::cout << "time_ms: " << timer.ms() << "\n";
    return 0;
}

// ------------------------------------------------------------ borel-check ----

int run_borel(const std::string& first_file, const std::string& second_file,
              const std::string& a_file, const std::string& fragment_spec,
              std::uint64_t max_fragment, int nmax, bool as_json) {
    Timer timer;
    Structure m = load_structure(first_file);
    Structure n = load_structure(second_file);
    FormulaSet a =
        resolve_formula_set(m.signature(), a_file, fragment_spec, max_fragment);

    bool member = borel_membership(m, n, a);
    bool equal_counts = e_equiv(m, n, a).verdict;
    bool agree = member == equal_counts;
    std::optional<bool> remark;
    if (nmax >= 0) remark = remark_check(m, n, a, static_cast<Nat>(nmax));

    if (as_json) {
        json out{{"command", "borel-check"},
                 {"first", first_file},
                 {"second", second_file},
                 {"formulas", a.size()},
                 {"borel_membership", member},
                 {"e_equiv", equal_counts},
                 {"agreement", agree ? "AGREE" : "DISAGREE"}};
        if (remark) {
            out["remark_check"] = *remark;
            out["nmax"] = nmax;
        }
        out["time_ms"] = timer.ms();
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "command: borel-check\n"
                  << "first: " << first_file << "\n"
                  << "second: " << second_file << "\n"
                  << "formulas: " << a.size() << "\n"
                  << "borel_membership: " << (member ? "true" : "false") << "\n"
                  << "e_equiv: " << (equal_counts ? "true" : "false") << "\n"
                  << "agreement: " << (agree ? "AGREE" : "DISAGREE") << "\n";
        if (remark)
            std::cout << "remark_check: " << (*remark ? "true" : "false") << "\n"
                      << "nmax: " << nmax << "\n";
        std::cout << "time_ms: " << timer.ms() << "\n";
    }

    if (!agree) {
        std::cerr << "error: membership and count verdicts disagree\n";
        return 2;
    }
    return member ? 0 : 1;
}

// ------------------------------------------------------------ vaught-demo ----

struct VaughtClass {
    std::string key;  // "(fin:1, inf)"
    Count in_r = Count::finite(0);
    Count out_r = Count::finite(0);
    std::vector<std::size_t> members;
};

int run_vaught(Nat max_prefix, Nat max_cycle, bool as_json, bool parallel) {
    Timer timer;
    if (max_cycle == 0) throw Error("cycle bound must be positive");

    // Every normal form with prefix length <= p and cycle length <= c, one
    // structure per distinct set, ordered by serialized form.
    std::map<std::string, PeriodicSet> sets;
    for (Nat pl = 0; pl <= max_prefix; ++pl)
        for (std::uint64_t pb = 0; pb < (1ull << pl); ++pb)
            for (Nat cl = 1; cl <= max_cycle; ++cl)
                for (std::uint64_t cb = 0; cb < (1ull << cl); ++cb) {
                    PeriodicSet::Bits prefix(pl), cycle(cl);
                    for (Nat i = 0; i < pl; ++i) prefix[i] = pb >> i & 1;
                    for (Nat i = 0; i < cl; ++i) cycle[i] = cb >> i & 1;
                    PeriodicSet s(std::move(prefix), std::move(cycle));
                    sets.emplace(s.str(), s);
                }

    Signature sig({{"R", 1}}, false);
    std::vector<Structure> structures;
    std::vector<PeriodicSet> rsets;
    for (const auto& [_, s] : sets) {
        rsets.push_back(s);
        structures.push_back(Structure(PeriodicUnaryStructure(sig, {s})));
    }
    const std::size_t count_n = structures.size();

    Formula r_atom = parse("R(v0)", sig);
    Formula r_neg = parse("~R(v0)", sig);
    FormulaSet a(sig, {r_atom, r_neg});

    // Verdicts must match on every pair: isomorphic iff equal counts.
    std::vector<std::pair<std::size_t, std::size_t>> violations;
    std::mutex vmutex;
    unsigned threads =
        parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        std::vector<std::pair<std::size_t, std::size_t>> local;
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count_n) break;
            for (std::size_t j = i + 1; j < count_n; ++j) {
                bool iso = isomorphic(structures[i], structures[j]).verdict;
                bool eq = e_equiv(structures[i], structures[j], a).verdict;
                if (iso != eq) local.emplace_back(i, j);
            }
        }
        if (!local.empty()) {
            std::lock_guard<std::mutex> lock(vmutex);
            violations.insert(violations.end(), local.begin(), local.end());
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    std::sort(violations.begin(), violations.end());

    // Census: classes keyed by the two counts. Equal keys mean equal counts,
    // so with zero violations the key determines the isomorphism class.
    std::map<std::pair<Count, Count>, VaughtClass,
             decltype([](const std::pair<Count, Count>& a,
                         const std::pair<Count, Count>& b) {
                 if (a.first != b.first) return a.first < b.first;
                 return a.second < b.second;
             })>
        census;
    for (std::size_t i = 0; i < count_n; ++i) {
        Count in_r = count(structures[i], r_atom);
        Count out_r = count(structures[i], r_neg);
        auto key = std::make_pair(in_r, out_r);
        auto it = census.find(key);
        if (it == census.end()) {
            VaughtClass c;
            c.key = "(" + in_r.str() + ", " + out_r.str() + ")";
            c.in_r = in_r;
            c.out_r = out_r;
            it = census.emplace(key, std::move(c)).first;
        }
        it->second.members.push_back(i);
    }

    bool key_ok = violations.empty();

    // One witness permutation per class, from its first and last members
    // (identical for singletons): order-preserving part maps on the R class
    // and its complement.
    struct Theta {
        std::string klass;
        std::size_t a, b;
        std::vector<std::pair<std::string, std::string>> parts;  // labeled
    };
    std::vector<Theta> thetas;
    for (const auto& [_, c] : census) {
        std::size_t i = c.members.front();
        std::size_t j = c.members.back();
        EquivReport rep = isomorphic(structures[i], structures[j]);
        Theta th;
        th.klass = c.key;
        th.a = i;
        th.b = j;
        if (rep.verdict && rep.witness &&
            std::holds_alternative<ClassBijection>(*rep.witness)) {
            const auto& parts = std::get<ClassBijection>(*rep.witness).parts();
            for (const auto& [from, to] : parts) {
                std::string label =
                    from.str() == rsets[i].str() ? "tau" : "sigma";
                th.parts.emplace_back(label, from.str() + " -> " + to.str());
            }
        }
        thetas.push_back(std::move(th));
    }

    if (as_json) {
        json jcensus = json::array();
        for (const auto& [_, c] : census)
            jcensus.push_back(json{{"key", c.key},
                                   {"in_count", count_json(c.in_r)},
                                   {"out_count", count_json(c.out_r)},
                                   {"size", c.members.size()},
                                   {"representative", rsets[c.members.front()].str()}});
        json jthetas = json::array();
        for (const Theta& th : thetas) {
            json parts = json::array();
            for (const auto& [label, map] : th.parts)
                parts.push_back(json{{"label", label}, {"map", map}});
            jthetas.push_back(json{{"class", th.klass},
                                   {"pair", {rsets[th.a].str(), rsets[th.b].str()}},
                                   {"parts", parts}});
        }
        json jviol = json::array();
        for (auto [i, j] : violations)
            jviol.push_back(json{{"first", rsets[i].str()},
                                 {"second", rsets[j].str()}});
        json out{{"command", "vaught-demo"},
                 {"max_prefix", max_prefix},
                 {"max_cycle", max_cycle},
                 {"structures", count_n},
                 {"pairs", count_n * (count_n - 1) / 2},
                 {"violations", jviol},
                 {"classes", census.size()},
                 {"census", jcensus},
                 {"thetas", jthetas},
                 {"key_determines_class", key_ok},
                 {"time_ms", timer.ms()}};
        std::cout << out.dump() << "\n";
        return key_ok ? 0 : 1;
    }

    std::cout << "command: vaught-demo\n"
              << "bounds: prefix <= " << max_prefix << ", cycle <= " << max_cycle
              << "\n"
              << "structures: " << count_n << "\n"
              << "pairs: " << count_n * (count_n - 1) / 2 << "\n"
              << "violations: " << violations.size() << "\n";
    for (std::size_t v = 0; v < violations.size() && v < 5; ++v)
        std::cout << "violation: " << rsets[violations[v].first].str() << " vs "
                  << rsets[violations[v].second].str() << "\n";
    std::cout << "classes: " << census.size() << "\n";
    std::size_t ti = 0;
    for (const auto& [_, c] : census) {
        std::cout << "class " << c.key << ": size " << c.members.size()
                  << ", representative " << rsets[c.members.front()].str()
                  << "\n";
        const Theta& th = thetas[ti++];
        std::cout << "  theta pair: " << rsets[th.a].str() << " | "
                  << rsets[th.b].str() << "\n";
        for (const auto& [label, map] : th.parts)
            std::cout << "  theta " << label << ": " << map << "\n";
    }
    std::cout << "key_determines_class: " << (key_ok ? "true" : "false") << "\n"
              << "time_ms: " << timer.ms() << "\n";
    return key_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"realization-count equivalence toolkit"};
    app.require_subcommand(1);

    bool as_json = false;
    bool parallel = false;
    app.add_flag("--json", as_json, "emit a JSON report");
    app.add_flag("--parallel", parallel, "evaluate independent pairs concurrently");

    std::string count_structure, count_formula;
    bool count_show_set = false;
    CLI::App* c_count = app.add_subcommand("count", "count realizations of a formula");
    c_count->add_option("structure", count_structure, "structure document")->required();
    c_count->add_option("formula", count_formula, "formula text")->required();
    c_count->add_flag("--realizations", count_show_set, "always list a finite set");

    std::string d_first, d_second, d_afile, d_fragment;
    std::uint64_t max_fragment = 0;
    CLI::App* c_dist = app.add_subcommand("distinguish",
                                          "find a formula with diverging counts");
    c_dist->add_option("first", d_first, "first structure document")->required();
    c_dist->add_option("second", d_second, "second structure document")->required();
    c_dist->add_option("formulas", d_afile, "formula list file");
    c_dist->add_option("--fragment", d_fragment, "generate the set: RANK,VARS");
    c_dist->add_option("--max-fragment", max_fragment, "formula budget for --fragment");

    std::string cl_dir, cl_afile, cl_fragment;
    bool cl_iso = false;
    int cl_ef = -1;
    CLI::App* c_cls = app.add_subcommand("classify", "partition a directory of structures");
    c_cls->add_option("directory", cl_dir, "directory of structure documents")->required();
    c_cls->add_option("--ea", cl_afile, "equal counts over this formula file");
    c_cls->add_option("--fragment", cl_fragment, "equal counts over a fragment: RANK,VARS");
    c_cls->add_flag("--iso", cl_iso, "isomorphism classes");
    c_cls->add_option("--ef-rank", cl_ef, "game equivalence at this round count");

    std::string b_first, b_second, b_afile, b_fragment;
    int b_nmax = -1;
    CLI::App* c_bor = app.add_subcommand(
        "borel-check", "membership test cross-checked against counts");
    c_bor->add_option("first", b_first, "first structure document")->required();
    c_bor->add_option("second", b_second, "second structure document")->required();
    c_bor->add_option("formulas", b_afile, "formula list file");
    c_bor->add_option("--fragment", b_fragment, "generate the set: RANK,VARS");
    c_bor->add_option("--max-fragment", max_fragment, "formula budget for --fragment");
    c_bor->add_option("--nmax", b_nmax, "also run the truncated comparison at this depth");

    Nat v_prefix = 6, v_cycle = 4;
    CLI::App* c_vau = app.add_subcommand(
        "vaught-demo", "census of periodic unary structures under one relation");
    c_vau->add_option("--prefix", v_prefix, "largest prefix length");
    c_vau->add_option("--cycle", v_cycle, "largest cycle length");

    for (CLI::App* sub : {c_count, c_dist, c_cls, c_bor, c_vau})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_count->parsed())
            return run_count(count_structure, count_formula, as_json, count_show_set);
        if (c_dist->parsed())
            return run_distinguish(d_first, d_second, d_afile, d_fragment,
                                   max_fragment, as_json);
        if (c_cls->parsed())
            return run_classify(cl_dir, cl_afile, cl_fragment, max_fragment,
                                cl_iso, cl_ef, as_json, parallel);
        if (c_bor->parsed())
            return run_borel(b_first, b_second, b_afile, b_fragment, max_fragment,
                             b_nmax, as_json);
        if (c_vau->parsed()) return run_vaught(v_prefix, v_cycle, as_json, parallel);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
