#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "asg/cost.hpp"
#include "asg/eval.hpp"

namespace asg {

namespace {

std::vector<Pixel> pixelsOf(const Mask& m) {
    std::vector<Pixel> out;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m(x, y)) out.push_back({x, y});
        }
    }
    return out;
}

// Hopcroft-Karp over a left-to-right adjacency list.
class HopcroftKarp {
public:
    HopcroftKarp(const std::vector<std::vector<int>>& adj, int rightCount)
        : adj_(adj), matchL_(adj.size(), -1), matchR_(static_cast<std::size_t>(rightCount), -1), dist_(adj.size()) {}

    void run() {
        while (bfs()) {
            it_.assign(adj_.size(), 0);
            for (std::size_t u = 0; u < adj_.size(); ++u) {
                if (matchL_[u] < 0) dfs(static_cast<int>(u));
            }
        }
    }
    const std::vector<int>& matchLeft() const { return matchL_; }

private:
    static constexpr int kInf = std::numeric_limits<int>::max();

    bool bfs() {
        std::deque<int> q;
        bool found = false;
        for (std::size_t u = 0; u < adj_.size(); ++u) {
            if (matchL_[u] < 0) {
                dist_[u] = 0;
                q.push_back(static_cast<int>(u));
            } else {
                dist_[u] = kInf;
            }
        }
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            for (int v : adj_[static_cast<std::size_t>(u)]) {
                const int w = matchR_[static_cast<std::size_t>(v)];
                if (w < 0) {
                    found = true;
                } else if (dist_[static_cast<std::size_t>(w)] == kInf) {
                    dist_[static_cast<std::size_t>(w)] = dist_[static_cast<std::size_t>(u)] + 1;
                    q.push_back(w);
                }
            }
        }
        return found;
    }

    // Iterative layered DFS from a free left vertex.
    bool dfs(int root) {
        std::vector<int> stack{root};
        while (!stack.empty()) {
            const int u = stack.back();
            auto& i = it_[static_cast<std::size_t>(u)];
            const auto& nbrs = adj_[static_cast<std::size_t>(u)];
            bool advanced = false;
            for (; i < nbrs.size(); ++i) {
                const int v = nbrs[i];
                const int w = matchR_[static_cast<std::size_t>(v)];
                if (w < 0) {
                    // Augment along the stack.
                    int right = v;
                    for (auto s = stack.rbegin(); s != stack.rend(); ++s) {
                        const int left = *s;
                        const int prev = matchL_[static_cast<std::size_t>(left)];
                        matchL_[static_cast<std::size_t>(left)] = right;
                        matchR_[static_cast<std::size_t>(right)] = left;
                        right = prev;
                    }
                    return true;
                }
                if (dist_[static_cast<std::size_t>(w)] == dist_[static_cast<std::size_t>(u)] + 1) {
                    ++i;
                    stack.push_back(w);
                    advanced = true;
                    break;
                }
            }
            if (!advanced) {
                dist_[static_cast<std::size_t>(u)] = kInf;
                stack.pop_back();
            }
        }
        return false;
    }

    const std::vector<std::vector<int>>& adj_;
    std::vector<int> matchL_;
    std::vector<int> matchR_;
    std::vector<int> dist_;
    std::vector<std::size_t> it_;
};

AnnotationScore toScore(const MatchResult& m) {
    AnnotationScore s;
    s.tpPred = m.tpPred;
    s.tpGt = m.tpGt;
    s.predCount = m.predCount;
    s.gtCount = m.gtCount;
    s.precision = m.predCount ? static_cast<double>(m.tpPred) / m.predCount : 0.0;
    s.recall = m.gtCount ? static_cast<double>(m.tpGt) / m.gtCount : 0.0;
    if (m.predCount == 0 || m.gtCount == 0) s.precision = s.recall = 0.0;
    s.f1 = f1Score(s.precision, s.recall);
    return s;
}

void requireAnnotations(const std::vector<Annotation>& annotations) {
    if (annotations.empty()) throw std::invalid_argument("at least one annotation is required");
}

}  // namespace

double toleranceForImage(int width, int height, double fraction) {
    return fraction * std::sqrt(static_cast<double>(width) * width + static_cast<double>(height) * height);
}

double f1Score(double precision, double recall) {
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

MatchResult matchSkeletons(const Mask& pred, const Mask& gt, double tol, long long cap) {
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
        throw std::invalid_argument("matchSkeletons: dimension mismatch");
    }
    if (!(tol >= 0.0)) throw std::invalid_argument("matchSkeletons: tolerance must be >= 0");
    const int W = pred.width();
    const int H = pred.height();

    MatchResult res;
    res.tolerance = tol;
    res.matchedPred = Mask(W, H, 0);
    res.matchedGt = Mask(W, H, 0);
    const std::vector<Pixel> P = pixelsOf(pred);
    const std::vector<Pixel> G = pixelsOf(gt);
    res.predCount = P.size();
    res.gtCount = G.size();
    if (P.empty() || G.empty()) return res;

    Raster<int> gtIndex(W, H, -1);
    for (std::size_t i = 0; i < G.size(); ++i) gtIndex[G[i]] = static_cast<int>(i);

    // Offsets within tolerance, nearest first so adjacency lists are sorted by distance.
    const int reach = static_cast<int>(std::floor(tol));
    const double tol2 = tol * tol + 1e-9;
    std::vector<Pixel> offsets;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            if (dx * dx + dy * dy <= tol2) offsets.push_back({dx, dy});
        }
    }
    std::stable_sort(offsets.begin(), offsets.end(),
                     [](Pixel a, Pixel b) { return a.x * a.x + a.y * a.y < b.x * b.x + b.y * b.y; });

    std::vector<std::vector<int>> adj(P.size());
    long long edges = 0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        for (const Pixel& o : offsets) {
            const int x = P[i].x + o.x;
            const int y = P[i].y + o.y;
            if (x < 0 || y < 0 || x >= W || y >= H) continue;
            const int g = gtIndex(x, y);
            if (g >= 0) {
                adj[i].push_back(g);
                ++edges;
            }
        }
    }

    std::vector<int> matchL(P.size(), -1);
    if (edges > cap) {
        res.greedy = true;
        struct Edge {
            int d2;
            int p;
            int g;
        };
        std::vector<Edge> all;
        all.reserve(static_cast<std::size_t>(edges));
        for (std::size_t i = 0; i < P.size(); ++i) {
            for (int g : adj[i]) {
                const int dx = G[static_cast<std::size_t>(g)].x - P[i].x;
                const int dy = G[static_cast<std::size_t>(g)].y - P[i].y;
                all.push_back({dx * dx + dy * dy, static_cast<int>(i), g});
            }
        }
        std::stable_sort(all.begin(), all.end(), [](const Edge& a, const Edge& b) { return a.d2 < b.d2; });
        std::vector<char> gUsed(G.size(), 0);
        for (const Edge& e : all) {
            if (matchL[static_cast<std::size_t>(e.p)] >= 0 || gUsed[static_cast<std::size_t>(e.g)]) continue;
            matchL[static_cast<std::size_t>(e.p)] = e.g;
            gUsed[static_cast<std::size_t>(e.g)] = 1;
        }
    } else {
        HopcroftKarp hk(adj, static_cast<int>(G.size()));
        hk.run();
        matchL = hk.matchLeft();
    }

    for (std::size_t i = 0; i < P.size(); ++i) {
        const int g = matchL[i];
        if (g < 0) continue;
        res.matchedPred[P[i]] = 1;
        res.matchedGt[G[static_cast<std::size_t>(g)]] = 1;
        res.pairs.push_back({P[i], G[static_cast<std::size_t>(g)]});
    }
    res.tpPred = res.tpGt = res.pairs.size();
    return res;
}

EvalResult scoreStandard(const Mask& pred, const std::vector<Annotation>& annotations, double tol, long long cap) {
    requireAnnotations(annotations);
    EvalResult out;
    out.protocol = "standard";
    out.tolerance = tol;
    Mask anyMatched(pred.width(), pred.height(), 0);
    std::size_t tpGt = 0;
    std::size_t gtTotal = 0;
    for (const auto& a : annotations) {
        const MatchResult m = matchSkeletons(pred, a.skeleton, tol, cap);
        for (std::size_t i = 0; i < m.matchedPred.size(); ++i) anyMatched.data()[i] |= m.matchedPred.data()[i];
        tpGt += m.tpGt;
        gtTotal += m.gtCount;
        out.perAnnotation.push_back(toScore(m));
    }
    const std::size_t predCount = countSet(pred);
    if (predCount > 0 && gtTotal > 0) {
        out.precision = static_cast<double>(countSet(anyMatched)) / predCount;
        out.recall = static_cast<double>(tpGt) / gtTotal;
    }
    out.f1 = f1Score(out.precision, out.recall);
    return out;
}

EvalResult scoreSingleAnnotation(const Mask& pred, const std::vector<Annotation>& annotations, double tol,
                                 long long cap) {
    requireAnnotations(annotations);
    EvalResult out;
    out.protocol = "single";
    out.tolerance = tol;
    for (std::size_t k = 0; k < annotations.size(); ++k) {
        out.perAnnotation.push_back(toScore(matchSkeletons(pred, annotations[k].skeleton, tol, cap)));
        const auto& s = out.perAnnotation.back();
        if (out.bestAnnotation < 0 || s.f1 > out.f1) {
            out.bestAnnotation = static_cast<int>(k);
            out.precision = s.precision;
            out.recall = s.recall;
            out.f1 = s.f1;
        }
    }
    return out;
}

Raster<double> ligatureWeights(const Mask& skeleton, const Gray16& radius, int horizon) {
    if (skeleton.width() != radius.width() || skeleton.height() != radius.height()) {
        throw std::invalid_argument("ligatureWeights: radius map size differs from skeleton");
    }
    const int W = skeleton.width();
    const int H = skeleton.height();
    Raster<double> weights(W, H, 0.0);
    Raster<int> seen(W, H, -1);
    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(W) * H, 0);
    std::uint32_t stampId = 0;

    int stampOwner = 0;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!skeleton(x, y)) continue;
            ++stampOwner;
            // Neighbors within `horizon` steps along the skeleton.
            std::vector<Pixel> frontier{{x, y}};
            std::vector<Pixel> near;
            seen(x, y) = stampOwner;
            for (int d = 0; d < horizon && !frontier.empty(); ++d) {
                std::vector<Pixel> next;
                for (const Pixel& p : frontier) {
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const Pixel q{p.x + dx, p.y + dy};
                            if (!skeleton.contains(q) || !skeleton[q] || seen[q] == stampOwner) continue;
                            seen[q] = stampOwner;
                            next.push_back(q);
                            near.push_back(q);
                        }
                    }
                }
                frontier = std::move(next);
            }

            ++stampId;
            const int r = radius(x, y);
            const DiskGeometry disk(r);
            for (const Pixel& q : near) {
                const int rq = radius[q];
                const DiskGeometry dq(rq);
                for (const Pixel& o : dq.offsets()) {
                    const int px = q.x + o.x;
                    const int py = q.y + o.y;
                    // Only pixels inside p's disk matter.
                    const int ex = px - x;
                    const int ey = py - y;
                    if (ex * ex + ey * ey > r * r) continue;
                    if (px < 0 || py < 0 || px >= W || py >= H) {
                        continue;
                    }
                    stamp[static_cast<std::size_t>(py) * W + px] = stampId;
                }
            }
            std::size_t uncovered = 0;
            std::size_t total = 0;
            for (const Pixel& o : disk.offsets()) {
                ++total;
                const int px = x + o.x;
                const int py = y + o.y;
                if (px < 0 || py < 0 || px >= W || py >= H) {
                    // Off-canvas disk pixels: covered iff some neighbor disk reaches them.
                    bool cov = false;
                    for (const Pixel& q : near) {
                        const int rq = radius[q];
                        const int ex = px - q.x;
                        const int ey = py - q.y;
                        if (ex * ex + ey * ey <= rq * rq) {
                            cov = true;
                            break;
                        }
                    }
                    if (!cov) ++uncovered;
                    continue;
                }
                if (stamp[static_cast<std::size_t>(py) * W + px] != stampId) ++uncovered;
            }
            weights(x, y) = std::clamp(static_cast<double>(uncovered) / static_cast<double>(total), 0.0, 1.0);
        }
    }
    return weights;
}

EvalResult scoreWeighted(const Mask& pred, const std::vector<Annotation>& annotations,
                         const std::vector<Raster<double>>& weights, double tol, const std::string& protocol,
                         bool weightPrecision, long long cap) {
    requireAnnotations(annotations);
    if (weights.size() != annotations.size()) throw std::invalid_argument("scoreWeighted: one weight map per annotation");
    if (protocol != "standard" && protocol != "single") throw std::invalid_argument("unknown protocol '" + protocol + "'");

    EvalResult out;
    out.protocol = protocol;
    out.weighted = true;
    out.tolerance = tol;

    const std::size_t predCount = countSet(pred);
    Raster<double> predWeight(pred.width(), pred.height(), -1.0);  // -1: unmatched
    double wMatchedAll = 0.0;
    double wTotalAll = 0.0;
    for (std::size_t k = 0; k < annotations.size(); ++k) {
        const auto& w = weights[k];
        const MatchResult m = matchSkeletons(pred, annotations[k].skeleton, tol, cap);
        AnnotationScore s = toScore(m);
        double wMatched = 0.0;
        double wTotal = 0.0;
        for (int y = 0; y < m.matchedGt.height(); ++y) {
            for (int x = 0; x < m.matchedGt.width(); ++x) {
                if (!annotations[k].skeleton(x, y)) continue;
                wTotal += w(x, y);
                if (m.matchedGt(x, y)) wMatched += w(x, y);
            }
        }
        s.weightedRecall = wTotal > 0.0 && predCount > 0 ? wMatched / wTotal : 0.0;
        Raster<double> pw(pred.width(), pred.height(), -1.0);
        for (const auto& [pp, gp] : m.pairs) {
            pw[pp] = w[gp];
            predWeight[pp] = std::max(predWeight[pp], w[gp]);
        }
        if (weightPrecision) {
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < pw.size(); ++i) {
                if (!pred.data()[i]) continue;
                const double v = pw.data()[i] < 0.0 ? 1.0 : pw.data()[i];
                den += v;
                if (pw.data()[i] >= 0.0) num += v;
            }
            s.weightedPrecision = den > 0.0 && m.gtCount > 0 ? num / den : 0.0;
        }
        wMatchedAll += wMatched;
        wTotalAll += wTotal;
        out.perAnnotation.push_back(s);
    }

    if (protocol == "single") {
        double bestF1 = -1.0;
        for (std::size_t k = 0; k < out.perAnnotation.size(); ++k) {
            const auto& s = out.perAnnotation[k];
            const double p = weightPrecision ? *s.weightedPrecision : s.precision;
            const double r = *s.weightedRecall;
            const double f = f1Score(p, r);
            if (f > bestF1) {
                bestF1 = f;
                out.bestAnnotation = static_cast<int>(k);
                out.precision = p;
                out.recall = r;
                out.f1 = f;
            }
        }
        return out;
    }

    std::size_t anyMatched = 0;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < predWeight.size(); ++i) {
        if (!pred.data()[i]) continue;
        const double v = predWeight.data()[i];
        if (v >= 0.0) ++anyMatched;
        den += v < 0.0 ? 1.0 : v;
        if (v >= 0.0) num += v;
    }
    if (predCount > 0 && wTotalAll > 0.0) {
        out.precision = weightPrecision ? (den > 0.0 ? num / den : 0.0) : static_cast<double>(anyMatched) / predCount;
        out.recall = wMatchedAll / wTotalAll;
    }
    out.f1 = f1Score(out.precision, out.recall);
    return out;
}

}  // namespace asg
