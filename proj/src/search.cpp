#include "hdr/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace hdr {

namespace {

constexpr double kFreshnessHalfLifeDays = 180.0;
constexpr double kUnknownFreshness = 0.5;
constexpr double kCompletenessSaturationChars = 400.0;

std::string result_text(const RawSearchResult& r) { return r.title + " " + r.snippet; }

}  // namespace

SubjectProfile default_subject(const QueryUnderstanding& understanding) {
    SubjectProfile p;
    p.canonical_name = understanding.entities.empty() ? understanding.query.text : understanding.entities.front();
    for (std::size_t i = 1; i < understanding.entities.size(); ++i) {
        p.descriptors.push_back(understanding.entities[i]);
    }
    auto name_tokens = tokenize(p.canonical_name);
    for (const auto& tok : tokenize(understanding.query.text)) {
        if (is_stopword(tok) || tok.size() < 3) continue;
        if (std::find(name_tokens.begin(), name_tokens.end(), tok) != name_tokens.end()) continue;
        if (std::find(p.descriptors.begin(), p.descriptors.end(), tok) == p.descriptors.end()) {
            p.descriptors.push_back(tok);
        }
    }
    return p;
}

bool has_advanced_syntax(const std::string& query) {
    if (query.find("site:") != std::string::npos) return true;
    if (query.find("after:") != std::string::npos) return true;
    return query.find('"') != std::string::npos;
}

std::vector<std::string> optimize_query(const std::string& query, const QueryUnderstanding& understanding) {
    if (query.empty()) throw Error("optimize_query requires a non-empty query");
    std::vector<std::string> variants{query};
    if (has_advanced_syntax(query)) return variants;

    auto push_unique = [&](std::string v) {
        if (std::find(variants.begin(), variants.end(), v) == variants.end()) variants.push_back(std::move(v));
    };

    const auto& temporal = understanding.temporal;
    if (temporal.category != TemporalCategory::None) {
        std::optional<Date> year_source =
            temporal.end_date ? temporal.end_date : (temporal.start_date ? temporal.start_date : temporal.reference_date);
        if (year_source) {
            push_unique(std::to_string(int(year_source->year())) + " " + query);
        }
        if (temporal.start_date) {
            push_unique(query + " after:" + format_date(*temporal.start_date));
        }
    }
    if (understanding.query.constraints.target_domain) {
        push_unique(query + " site:" + *understanding.query.constraints.target_domain);
    }
    if (understanding.query.constraints.exact_phrase) {
        push_unique(query + " \"" + *understanding.query.constraints.exact_phrase + "\"");
    }
    return variants;
}

double subject_score(double lex, double sem, double lambda) { return lambda * lex + (1.0 - lambda) * sem; }

double composite_quality(const QualityScore& dimensions, const QualityWeights& weights) {
    return weights.relevance * dimensions.relevance + weights.authority * dimensions.authority +
           weights.freshness * dimensions.freshness + weights.completeness * dimensions.completeness;
}

double subject_relevance_text(std::string_view text, const SubjectProfile& profile) {
    double lex = 0.0;
    if (contains_phrase(text, profile.canonical_name)) {
        lex = 1.0;
    } else {
        for (const auto& alias : profile.aliases) {
            if (contains_phrase(text, alias)) {
                lex = 1.0;
                break;
            }
        }
    }
    if (lex < 1.0) {
        lex = token_overlap(tokenize(profile.canonical_name), tokenize(text));
    }

    std::string descriptor_bag;
    for (const auto& d : profile.descriptors) {
        descriptor_bag += d;
        descriptor_bag += ' ';
    }
    double sem = std::clamp(tf_cosine(tokenize(descriptor_bag), tokenize(text)), 0.0, 1.0);

    return subject_score(lex, sem, profile.lambda);
}

double subject_relevance(const RawSearchResult& result, const SubjectProfile& profile) {
    return subject_relevance_text(result_text(result), profile);
}

QualityScore score_result(const RawSearchResult& result, const std::string& query,
                          const SubjectProfile& profile, const SourceCatalog& catalog, Date now,
                          const QualityWeights& weights) {
    QualityScore s;
    s.authority = catalog.authority_for(result.url);

    double base_relevance = token_overlap(tokenize(query), tokenize(result_text(result)));
    double rho = subject_relevance(result, profile);
    s.relevance = 0.4 * base_relevance + 0.6 * rho;

    if (result.published_at) {
        double age_days = static_cast<double>(days_between(*result.published_at, now));
        s.freshness = std::clamp(std::exp2(-age_days / kFreshnessHalfLifeDays), 0.0, 1.0);
    } else {
        s.freshness = kUnknownFreshness;
    }

    s.completeness = std::min(1.0, static_cast<double>(result.snippet.size()) / kCompletenessSaturationChars);

    s.composite = composite_quality(s, weights);
    return s;
}

std::vector<ScoredResult> execute_plan(const ResearchPlan& plan, const SubjectProfile& profile,
                                       ProviderGateway& gateway, const QueryUnderstanding& understanding,
                                       const SourceCatalog& catalog, Date now, const SearchBudget& budget) {
    if (plan.tasks.empty()) throw Error("execute_plan requires a non-empty plan");

    struct Pending {
        std::string query;
        std::string task_id;
        int depth = 0;
        bool optimize = true;
    };
    std::deque<Pending> pending;
    for (const auto& task : plan.tasks) {
        for (const auto& q : task.queries) pending.push_back({q, task.id, 0, true});
    }

    std::vector<ScoredResult> pool;
    std::set<std::string> expanded;
    int attempted = 0, failed = 0;
    while (!pending.empty()) {
        Pending item = pending.front();
        pending.pop_front();
        std::vector<std::string> variants =
            item.optimize ? optimize_query(item.query, understanding) : std::vector<std::string>{item.query};
        for (const auto& variant : variants) {
            ++attempted;
            std::vector<RawSearchResult> results;
            try {
                results = gateway.search({variant, std::nullopt, std::nullopt, budget.max_results_per_query});
            } catch (const AllProvidersFailed& e) {
                ++failed;
                log_warn("search failed for \"" + variant + "\": " + e.what());
                continue;
            }
            for (auto& raw : results) {
                double rho = subject_relevance(raw, profile);
                if (rho < profile.theta_s) continue;  // subject locking
                QualityScore quality = score_result(raw, variant, profile, catalog, now);
                if (quality.composite >= budget.recursion_threshold && item.depth < budget.d_max) {
                    std::string key = normalize_url(raw.url);
                    if (!raw.title.empty() && expanded.insert(key).second) {
                        pending.push_back({raw.title, item.task_id, item.depth + 1, false});
                    }
                }
                pool.push_back(ScoredResult{std::move(raw), quality, rho, item.task_id, item.depth});
            }
        }
    }
    if (attempted > 0 && failed == attempted) {
        throw AllProvidersFailed("every task's every query failed");
    }

    // Dedup by normalized URL keeping the highest-Q instance; first
    // occurrence keeps its position so merge output is arrival-order free.
    std::vector<ScoredResult> out;
    std::map<std::string, std::size_t> index;
    for (auto& sr : pool) {
        std::string key = normalize_url(sr.raw.url);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(std::move(key), out.size());
            out.push_back(std::move(sr));
        } else if (sr.quality.composite > out[it->second].quality.composite) {
            out[it->second] = std::move(sr);
        }
    }
    return out;
}

}  // namespace hdr
