#include "migsim/fragmentation.hpp"

namespace migsim {

// Literal restatement of the score definition, kept deliberately separate
// from frag_score: its own profile data, plain bool arrays, no masks.
int frag_score_oracle(const std::array<bool, 8>& occupancy) {
    struct Row {
        int width;
        int indexes[7];
        int index_count;
    };
    static const Row rows[6] = {
        {1, {0, 1, 2, 3, 4, 5, 6}, 7}, // 1g.10gb
        {2, {0, 2, 4, 6}, 4},          // 1g.20gb
        {2, {0, 2, 4}, 3},             // 2g.20gb
        {4, {0, 4}, 2},                // 3g.40gb
        {4, {0}, 1},                   // 4g.40gb
        {8, {0}, 1},                   // 7g.80gb
    };

    int free_slices = 0;
    for (bool used : occupancy) {
        if (!used) ++free_slices;
    }

    int score = 0;
    for (const Row& row : rows) {
        if (row.width > free_slices) continue;
        for (int k = 0; k < row.index_count; ++k) {
            int start = row.indexes[k];
            bool overlaps = false;
            for (int pos = start; pos < start + row.width; ++pos) {
                if (occupancy[pos]) overlaps = true;
            }
            if (overlaps) score += row.width;
        }
    }
    return score;
}

} // namespace migsim
