#include "cmm/mining.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace cmm {

std::string item_to_string(const Item& item) {
    return std::string(1, role_tag(item.role)) + ":" + std::to_string(item.id);
}

Item item_from_string(const std::string& text) {
    if (text.size() < 3 || text[1] != ':') {
        throw std::invalid_argument("bad item '" + text + "' (want e.g. T:5)");
    }
    Item item;
    item.role = role_from_tag(text[0]);
    item.id = std::stoi(text.substr(2));
    return item;
}

TransactionDB build_db(const std::vector<BestSetsEntry>& entries, Polarity which) {
    if (entries.empty()) throw std::invalid_argument("build_db: no scored points");
    TransactionDB db;
    db.tids.reserve(entries.size());
    db.transactions.reserve(entries.size());
    bool any_item = false;
    for (const auto& e : entries) {
        std::vector<Item> tx;
        const auto& sets = which == Polarity::Good ? e.best : e.bad;
        for (Role r : kRoles) {
            for (int id : sets[static_cast<int>(r)]) tx.push_back({r, id});
        }
        std::sort(tx.begin(), tx.end());
        tx.erase(std::unique(tx.begin(), tx.end()), tx.end());
        if (!tx.empty()) any_item = true;
        db.tids.push_back(e.point);
        db.transactions.push_back(std::move(tx));
    }
    if (!any_item) throw std::invalid_argument("build_db: all transactions are empty");
    return db;
}

int minsup_from_ratio(double ratio, std::size_t db_size) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw std::invalid_argument("minsup ratio must lie in (0,1]");
    }
    const int minsup = static_cast<int>(std::ceil(ratio * static_cast<double>(db_size)));
    return std::max(1, std::min(minsup, static_cast<int>(db_size)));
}

namespace {

using Tidset = std::vector<int>;

Tidset intersect(const Tidset& a, const Tidset& b) {
    Tidset out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool is_subset(const std::vector<Item>& a, const std::vector<Item>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::uint64_t tidset_hash(const Tidset& t) {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : t) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
    }
    return h;
}

// Search node: the itemset tail beyond the parent's prefix plus its tidset.
struct Node {
    std::vector<Item> items;
    Tidset tids;
    bool removed = false;
};

class CharmMiner {
public:
    CharmMiner(int minsup) : minsup_(minsup) {}

    void extend(std::vector<Node>& nodes, const std::vector<Item>& prefix) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].removed) continue;
            std::vector<Item> closure = nodes[i].items;  // prefix extension (properties 1-2)
            std::vector<Node> children;

            for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                if (nodes[j].removed) continue;
                Tidset shared = intersect(nodes[i].tids, nodes[j].tids);
                if (static_cast<int>(shared.size()) < minsup_) continue;
                const bool covers_i = shared.size() == nodes[i].tids.size();
                const bool covers_j = shared.size() == nodes[j].tids.size();
                if (covers_i && covers_j) {
                    // identical tidsets: absorb j into the closure
                    append(closure, nodes[j].items);
                    nodes[j].removed = true;
                } else if (covers_i) {
                    // t(i) subset of t(j): j's items join the closure, j survives
                    append(closure, nodes[j].items);
                } else if (covers_j) {
                    // t(j) subset of t(i): candidate child, j is subsumed
                    children.push_back({nodes[j].items, std::move(shared)});
                    nodes[j].removed = true;
                } else {
                    children.push_back({nodes[j].items, std::move(shared)});
                }
            }

            std::vector<Item> candidate = prefix;
            append(candidate, closure);
            std::sort(candidate.begin(), candidate.end());

            if (!children.empty()) {
                // children extend the finished closure, not the pre-scan items
                for (auto& c : children) {
                    std::vector<Item> full = closure;
                    append(full, c.items);
                    c.items = std::move(full);
                }
                std::stable_sort(children.begin(), children.end(), [](const Node& a, const Node& b) {
                    return a.tids.size() < b.tids.size();
                });
                extend(children, prefix);
            }

            insert_closed(std::move(candidate), nodes[i].tids);
        }
    }

    void insert_closed(std::vector<Item> items, const Tidset& tids) {
        const std::uint64_t h = tidset_hash(tids);
        auto [lo, hi] = seen_.equal_range(h);
        for (auto it = lo; it != hi; ++it) {
            const ClosedItemset& c = out_[it->second];
            if (c.tids == tids && is_subset(items, c.items)) return;  // subsumed
        }
        seen_.emplace(h, out_.size());
        out_.push_back({std::move(items), static_cast<int>(tids.size()), tids});
    }

    std::vector<ClosedItemset> take() { return std::move(out_); }

private:
    static void append(std::vector<Item>& dst, const std::vector<Item>& src) {
        for (const Item& it : src) {
            if (std::find(dst.begin(), dst.end(), it) == dst.end()) dst.push_back(it);
        }
    }

    int minsup_;
    std::vector<ClosedItemset> out_;
    std::unordered_multimap<std::uint64_t, std::size_t> seen_;
};

void canonicalize(std::vector<ClosedItemset>& sets) {
    std::sort(sets.begin(), sets.end(), [](const ClosedItemset& a, const ClosedItemset& b) {
        return a.items < b.items;
    });
}

std::map<Item, Tidset> vertical_view(const TransactionDB& db) {
    std::map<Item, Tidset> tidsets;
    for (std::size_t t = 0; t < db.transactions.size(); ++t) {
        for (const Item& item : db.transactions[t]) {
            tidsets[item].push_back(static_cast<int>(t));
        }
    }
    return tidsets;
}

}  // namespace

std::vector<ClosedItemset> charm(const TransactionDB& db, int minsup) {
    if (minsup < 1) throw std::invalid_argument("charm: minsup must be >= 1");
    if (db.size() == 0 || minsup > static_cast<int>(db.size())) return {};

    auto tidsets = vertical_view(db);
    std::vector<Node> roots;
    for (auto& [item, tids] : tidsets) {
        if (static_cast<int>(tids.size()) >= minsup) {
            roots.push_back({{item}, std::move(tids)});
        }
    }
    // process in ascending support, ties by item order
    std::stable_sort(roots.begin(), roots.end(),
                     [](const Node& a, const Node& b) { return a.tids.size() < b.tids.size(); });

    CharmMiner miner(minsup);
    miner.extend(roots, {});
    auto out = miner.take();
    canonicalize(out);
    return out;
}

std::vector<ClosedItemset> brute_force_closed(const TransactionDB& db, int minsup) {
    if (minsup < 1) throw std::invalid_argument("brute_force_closed: minsup must be >= 1");
    auto tidsets = vertical_view(db);
    std::vector<Item> universe;
    std::vector<Tidset> item_tids;
    for (auto& [item, tids] : tidsets) {
        universe.push_back(item);
        item_tids.push_back(std::move(tids));
    }
    const std::size_t m = universe.size();
    if (m > 20) {
        throw std::invalid_argument("brute_force_closed: item universe too large (" +
                                    std::to_string(m) + " > 20)");
    }

    std::vector<ClosedItemset> out;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        Tidset tids;
        bool first = true;
        for (std::size_t b = 0; b < m; ++b) {
            if (!(mask & (1u << b))) continue;
            tids = first ? item_tids[b] : intersect(tids, item_tids[b]);
            first = false;
            if (static_cast<int>(tids.size()) < minsup) break;
        }
        if (static_cast<int>(tids.size()) < minsup) continue;
        bool closed = true;
        for (std::size_t b = 0; b < m && closed; ++b) {
            if (mask & (1u << b)) continue;
            if (intersect(tids, item_tids[b]).size() == tids.size()) closed = false;
        }
        if (!closed) continue;
        ClosedItemset c;
        for (std::size_t b = 0; b < m; ++b) {
            if (mask & (1u << b)) c.items.push_back(universe[b]);
        }
        c.support = static_cast<int>(tids.size());
        c.tids = std::move(tids);
        out.push_back(std::move(c));
    }
    canonicalize(out);
    return out;
}

ConsistentSets consistent_models(const std::vector<ClosedItemset>& closed, const TransactionDB& db,
                                 double minsup_ratio) {
    (void)minsup_ratio;  // documented contract: `closed` was mined at ceil(ratio * |db|)
    ConsistentSets sets;
    for (const auto& c : closed) {
        for (const Item& item : c.items) {
            auto& ids = sets.ids[static_cast<int>(item.role)];
            if (std::find(ids.begin(), ids.end(), item.id) == ids.end()) ids.push_back(item.id);
        }
    }

    bool db_has_items = false;
    for (const auto& tx : db.transactions) {
        if (!tx.empty()) db_has_items = true;
    }
    if (!db_has_items) throw std::invalid_argument("consistent_models: db has no items");

    for (Role r : kRoles) {
        auto& ids = sets.ids[static_cast<int>(r)];
        if (!ids.empty()) {
            std::sort(ids.begin(), ids.end());
            continue;
        }
        // fall back to the single most frequent item of this component
        std::map<int, int> freq;
        for (const auto& tx : db.transactions) {
            for (const Item& item : tx) {
                if (item.role == r) ++freq[item.id];
            }
        }
        int best_id = -1, best_count = 0;
        for (const auto& [id, count] : freq) {
            if (count > best_count) {
                best_id = id;
                best_count = count;
            }
        }
        if (best_id >= 0) ids.push_back(best_id);
    }
    return sets;
}

std::string db_to_text(const TransactionDB& db) {
    std::string out;
    for (const auto& tx : db.transactions) {
        for (std::size_t i = 0; i < tx.size(); ++i) {
            if (i) out += ' ';
            out += item_to_string(tx[i]);
        }
        out += '\n';
    }
    return out;
}

TransactionDB db_from_text(const std::string& text) {
    TransactionDB db;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::vector<Item> tx;
        std::string tok;
        while (row >> tok) tx.push_back(item_from_string(tok));
        std::sort(tx.begin(), tx.end());
        tx.erase(std::unique(tx.begin(), tx.end()), tx.end());
        db.tids.push_back(static_cast<int>(db.transactions.size()));
        db.transactions.push_back(std::move(tx));
    }
    return db;
}

std::string closed_sets_to_json(const std::vector<ClosedItemset>& sets) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : sets) {
        nlohmann::json j;
        auto items = nlohmann::json::array();
        for (const Item& item : c.items) items.push_back(item_to_string(item));
        j["items"] = items;
        j["support"] = c.support;
        j["tids"] = c.tids;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

}  // namespace cmm
