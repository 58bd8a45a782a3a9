#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

#include "cmm/expert.hpp"
#include "cmm/registry.hpp"

namespace cmm {

/// A component-tagged atomic expert, so Trend#5 and Seasonal#5 are distinct
/// items. Ordered by (role rank, id).
struct Item {
    Role role = Role::Trend;
    int id = 0;

    friend auto operator<=>(const Item& a, const Item& b) = default;
};

std::string item_to_string(const Item& item);  // "T:5"
Item item_from_string(const std::string& text);

/// One transaction per scored training point; tid = point index. Transactions
/// hold sorted, de-duplicated items and may be empty.
struct TransactionDB {
    std::vector<int> tids;
    std::vector<std::vector<Item>> transactions;

    std::size_t size() const { return transactions.size(); }
};

enum class Polarity { Good, Bad };

/// Component-tagged best (or bad) ids per point, one transaction per entry.
TransactionDB build_db(const std::vector<BestSetsEntry>& entries, Polarity which);

struct ClosedItemset {
    std::vector<Item> items;  // sorted
    int support = 0;
    std::vector<int> tids;  // sorted transaction indices (positions, not point ids)

    friend bool operator==(const ClosedItemset& a, const ClosedItemset& b) {
        return a.items == b.items && a.support == b.support && a.tids == b.tids;
    }
};

/// CHARM over vertical tidsets: exactly the closed itemsets with support >=
/// minsup, in canonical order (sorted by items).
std::vector<ClosedItemset> charm(const TransactionDB& db, int minsup);

/// Exponential reference oracle: enumerates every non-empty itemset over the
/// db's item universe (must be <= 20 items) and keeps the frequent closed
/// ones. Test companion for charm; independent of its search.
std::vector<ClosedItemset> brute_force_closed(const TransactionDB& db, int minsup);

/// Final per-component model choices: the union of items over the closed
/// frequent sets, split by component. An empty component falls back to its
/// single most frequent item in the db; a component absent from the db
/// entirely stays empty (callers substitute the full pool).
struct ConsistentSets {
    std::array<std::vector<int>, 3> ids;  // per role, sorted ascending

    const std::vector<int>& of(Role r) const { return ids[static_cast<int>(r)]; }
};

ConsistentSets consistent_models(const std::vector<ClosedItemset>& closed,
                                 const TransactionDB& db, double minsup_ratio);

/// minsup implied by a ratio: ceil(ratio * |db|), clamped to [1, |db|].
int minsup_from_ratio(double ratio, std::size_t db_size);

std::string db_to_text(const TransactionDB& db);
TransactionDB db_from_text(const std::string& text);
std::string closed_sets_to_json(const std::vector<ClosedItemset>& sets);

}  // namespace cmm
