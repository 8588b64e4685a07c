#include "cbi/complexity.hpp"

#include <algorithm>

#include "cbi/errors.hpp"

namespace cbi {

namespace {

bool is_decision(const Stmt& s) {
    return s.kind == StmtKind::If || s.kind == StmtKind::For || s.kind == StmtKind::While;
}

void score_tree(const Stmt& s, int enclosing_decisions, const Cfg& cfg,
                StatementComplexityMap& out) {
    int here = enclosing_decisions + (is_decision(s) ? 1 : 0);
    if (s.kind != StmtKind::Block) {
        int id = -1;
        for (size_t i = 0; i < cfg.stmts.size(); ++i)
            if (cfg.stmts[i] == &s) {
                id = static_cast<int>(i);
                break;
            }
        out.entries.push_back({id, s.span, 1 + here});
    }
    if (s.init) score_tree(*s.init, here, cfg, out);
    if (s.body) score_tree(*s.body, here, cfg, out);
    if (s.else_body) score_tree(*s.else_body, here, cfg, out);
    for (const auto& c : s.stmts) score_tree(*c, here, cfg, out);
}

void collect_oracle_lines(const Function& fn, std::set<int>& lines) {
    for_each_stmt(fn, [&](const Stmt& s) {
        for_each_own_expr(s, [&](const Expr& e) {
            if (e.kind == ExprKind::Call && (e.name == "printf" || e.name == "abort"))
                lines.insert(e.line);
        });
    });
}

std::pair<int, int> pick_location(std::span<const StatementComplexityMap> maps) {
    const StatementComplexityMap::Entry* best = nullptr;
    std::set<int> oracle_lines;
    for (const auto& m : maps) oracle_lines.insert(m.oracle_lines.begin(), m.oracle_lines.end());
    auto overlaps_oracle = [&](const LineSpan& span) {
        auto it = oracle_lines.lower_bound(span.start);
        return it != oracle_lines.end() && *it <= span.end;
    };
    for (const auto& m : maps) {
        for (const auto& e : m.entries) {
            if (overlaps_oracle(e.span)) continue;
            if (!best || e.score > best->score ||
                (e.score == best->score &&
                 (e.span.start < best->span.start ||
                  (e.span.start == best->span.start && e.span.end > best->span.end))))
                best = &e;
        }
    }
    if (!best) throw NoEligibleLocation();
    return {best->span.start, best->span.end};
}

}  // namespace

VariableRanking rank_variables(const DefUseTable& table) {
    if (table.vars.empty()) throw EmptyProgram();
    VariableRanking r;
    for (const auto& [name, counts] : table.vars)
        r.entries.push_back({name, counts.n_def + counts.n_use, counts.declaring_line});
    std::stable_sort(r.entries.begin(), r.entries.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.declaring_line != b.declaring_line) return a.declaring_line < b.declaring_line;
        return a.name < b.name;
    });
    r.total_variables = static_cast<int>(r.entries.size());
    return r;
}

StatementComplexityMap statement_complexity(const Cfg& cfg, const Ast& ast) {
    StatementComplexityMap map;
    map.function = cfg.function;
    const Function* fn = ast.find_function(cfg.function);
    if (!fn) throw UnknownFunction(cfg.function);
    score_tree(*fn->body, 0, cfg, map);
    collect_oracle_lines(*fn, map.oracle_lines);
    return map;
}

std::vector<std::string> select_variables(const VariableRanking& ranking, int top_k) {
    if (ranking.entries.empty()) throw EmptyProgram();
    size_t take = ranking.total_variables <= top_k ? 1 : static_cast<size_t>(top_k);
    take = std::min(take, ranking.entries.size());
    std::vector<std::string> out;
    for (size_t i = 0; i < take; ++i) out.push_back(ranking.entries[i].name);
    return out;
}

std::pair<int, int> select_location(const StatementComplexityMap& map) {
    return pick_location(std::span(&map, 1));
}

std::pair<int, int> select_location(std::span<const StatementComplexityMap> maps) {
    return pick_location(maps);
}

MutationTarget select_mutation_target(const Ast& ast, int top_k) {
    MutationTarget target;
    target.variables = select_variables(rank_variables(def_use(ast)), top_k);
    std::vector<StatementComplexityMap> maps;
    for (const auto& fn : ast.functions)
        maps.push_back(statement_complexity(build_cfg(ast, fn.name), ast));
    auto [start, end] = select_location(std::span<const StatementComplexityMap>(maps));
    target.start_line = start;
    target.end_line = end;
    return target;
}

}  // namespace cbi
