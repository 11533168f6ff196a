#include "qdbn/chimera.hpp"

#include <set>

#include "doctest.h"

using namespace qdbn;

namespace {

// Independent adjacency rule, written against coordinates instead of the
// builder's loops: a pair couples iff same cell and opposite sides, or
// vertically adjacent cells with both qubits vertical and same index, or
// horizontally adjacent cells with both horizontal and same index.
bool oracle_adjacent(const ChimeraGraph& g, int a, int b) {
    QubitCoord x = g.coord_of(a), y = g.coord_of(b);
    if (x.cell_row == y.cell_row && x.cell_col == y.cell_col)
        return x.side != y.side;
    if (x.side != y.side || x.index != y.index) return false;
    if (x.side == Side::vertical)
        return x.cell_col == y.cell_col && std::abs(x.cell_row - y.cell_row) == 1;
    return x.cell_row == y.cell_row && std::abs(x.cell_col - y.cell_col) == 1;
}

int oracle_coupler_count(const ChimeraGraph& g) {
    int count = 0;
    for (int a = 0; a < g.num_qubits(); ++a)
        for (int b = a + 1; b < g.num_qubits(); ++b)
            if (oracle_adjacent(g, a, b) && g.usable(a) && g.usable(b)) ++count;
    return count;
}

}  // namespace

TEST_CASE("single cell is one K_{4,4}") {
    ChimeraGraph g = build_chimera(1, 1, 4);
    CHECK(g.num_qubits() == 8);
    CHECK(g.num_couplers() == 16);
    for (int q = 0; q < 8; ++q) CHECK(g.degree(q) == 4);
}

TEST_CASE("full chip counts") {
    ChimeraGraph g = build_chimera(8, 8, 4);
    CHECK(g.num_qubits() == 512);
    CHECK(g.num_couplers() == 1472);
    CHECK(g.num_couplers() == oracle_coupler_count(g));
}

TEST_CASE("coupler list matches the coordinate rule on odd shapes") {
    for (auto [r, c, k] : {std::tuple{2, 3, 2}, {3, 1, 4}, {1, 4, 3}}) {
        ChimeraGraph g = build_chimera(r, c, k);
        CHECK(g.num_couplers() == oracle_coupler_count(g));
        for (const auto& [a, b] : g.couplers) CHECK(oracle_adjacent(g, a, b));
    }
}

TEST_CASE("degree law: interior 6, corner-cell 5 at k=4") {
    ChimeraGraph g = build_chimera(3, 3, 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(g.degree(g.qubit_id({1, 1, Side::vertical, i})) == 6);
        CHECK(g.degree(g.qubit_id({1, 1, Side::horizontal, i})) == 6);
        CHECK(g.degree(g.qubit_id({0, 0, Side::vertical, i})) == 5);
        CHECK(g.degree(g.qubit_id({0, 0, Side::horizontal, i})) == 5);
        CHECK(g.degree(g.qubit_id({2, 2, Side::vertical, i})) == 5);
    }
}

TEST_CASE("faulty qubit loses all incident couplers") {
    // interior cell so the removed qubit has the full degree 6
    ChimeraGraph clean = build_chimera(3, 3, 4);
    int victim_degree = clean.degree(clean.qubit_id({1, 1, Side::vertical, 2}));
    CHECK(victim_degree == 6);

    ChimeraGraph g = build_chimera(3, 3, 4, {{1, 1, Side::vertical, 2}});
    int victim = g.qubit_id({1, 1, Side::vertical, 2});
    CHECK(g.num_couplers() == clean.num_couplers() - victim_degree);
    CHECK(g.degree(victim) == 0);
    CHECK(!g.usable(victim));
    for (const auto& [a, b] : g.couplers) {
        CHECK(a != victim);
        CHECK(b != victim);
    }
    CHECK(g.num_couplers() == oracle_coupler_count(g));

    // corner cells only reach degree 5
    ChimeraGraph g2 = build_chimera(2, 2, 4, {{0, 0, Side::vertical, 0}});
    ChimeraGraph clean2 = build_chimera(2, 2, 4);
    CHECK(clean2.num_couplers() - g2.num_couplers() == 5);
}

TEST_CASE("faulty coupler removal") {
    ChimeraGraph g = build_chimera(2, 2, 4, {},
                                   {{{0, 0, Side::vertical, 1}, {0, 0, Side::horizontal, 2}}});
    ChimeraGraph clean = build_chimera(2, 2, 4);
    CHECK(g.num_couplers() == clean.num_couplers() - 1);
    CHECK(!g.has_coupler(g.qubit_id({0, 0, Side::vertical, 1}),
                         g.qubit_id({0, 0, Side::horizontal, 2})));
}

TEST_CASE("fault list validation") {
    CHECK_THROWS_AS(build_chimera(0, 1, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_chimera(2, 2, 4, {{5, 0, Side::vertical, 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_chimera(2, 2, 4, {{0, 0, Side::vertical, 9}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        build_chimera(2, 2, 4, {{0, 0, Side::vertical, 1}, {0, 0, Side::vertical, 1}}),
        std::invalid_argument);
}

TEST_CASE("qubit id round trip") {
    ChimeraGraph g = build_chimera(3, 5, 4);
    for (int q = 0; q < g.num_qubits(); ++q) {
        QubitCoord c = g.coord_of(q);
        CHECK(g.qubit_id(c) == q);
    }
}

TEST_CASE("full 32x32 embedding on the ideal chip") {
    ChimeraGraph g = build_chimera(8, 8, 4);
    Embedding e = embed_rbm(32, 32, g);
    CHECK(e.missing_pairs.empty());
    CHECK(e.num_logical_couplers() == 1024);
    for (const auto& chain : e.visible_chains) CHECK(chain.size() == 8);
    for (const auto& chain : e.hidden_chains) CHECK(chain.size() == 8);
    for (const auto& links : e.visible_chain_couplers) CHECK(links.size() == 7);
    for (const auto& links : e.hidden_chain_couplers) CHECK(links.size() == 7);
}

TEST_CASE("chains are vertex-disjoint and respect orientation") {
    ChimeraGraph g = build_chimera(8, 8, 4);
    Embedding e = embed_rbm(32, 32, g);
    std::set<int> seen;
    for (const auto& chain : e.visible_chains)
        for (int q : chain) {
            CHECK(seen.insert(q).second);
            CHECK(g.coord_of(q).side == Side::vertical);
        }
    for (const auto& chain : e.hidden_chains)
        for (int q : chain) {
            CHECK(seen.insert(q).second);
            CHECK(g.coord_of(q).side == Side::horizontal);
        }
    CHECK(static_cast<int>(seen.size()) == 512);
}

TEST_CASE("crossings land in the right cell and really are couplers") {
    ChimeraGraph g = build_chimera(8, 8, 4);
    Embedding e = embed_rbm(32, 32, g);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            int qv = e.crossing_v(i, j), qh = e.crossing_h(i, j);
            REQUIRE(qv >= 0);
            REQUIRE(qh >= 0);
            CHECK(g.has_coupler(qv, qh));
            QubitCoord cv = g.coord_of(qv), ch = g.coord_of(qh);
            CHECK(cv.cell_row == j / 4);
            CHECK(cv.cell_col == i / 4);
            CHECK(ch.cell_row == j / 4);
            CHECK(ch.cell_col == i / 4);
            CHECK(cv.index == i % 4);
            CHECK(ch.index == j % 4);
        }
}

TEST_CASE("8x8 RBM on a 2x2 grid gives chains of length two") {
    ChimeraGraph g = build_chimera(2, 2, 4);
    Embedding e = embed_rbm(8, 8, g);
    CHECK(e.missing_pairs.empty());
    for (const auto& chain : e.visible_chains) CHECK(chain.size() == 2);
    for (const auto& chain : e.hidden_chains) CHECK(chain.size() == 2);
    for (const auto& links : e.visible_chain_couplers) CHECK(links.size() == 1);
}

TEST_CASE("capacity errors") {
    ChimeraGraph g = build_chimera(2, 2, 4);
    CHECK_THROWS_AS(embed_rbm(9, 8, g), std::invalid_argument);
    CHECK_THROWS_AS(embed_rbm(8, 9, g), std::invalid_argument);
    CHECK_NOTHROW(embed_rbm(8, 8, g));
}

TEST_CASE("eight synthetic faults cost exactly 32 of 1024 connections") {
    std::vector<QubitCoord> faults;
    for (int r = 0; r < 8; ++r) faults.push_back({r, r, Side::vertical, 0});
    ChimeraGraph g = build_chimera(8, 8, 4, faults);
    Embedding e = embed_rbm(32, 32, g);
    CHECK(e.missing_pairs.size() == 32);
    CHECK(e.num_logical_couplers() == 1024 - 32);

    MaskMatrix mask = missing_mask(e, 32, 32);
    CHECK(mask.count() == 32);
    // fault in cell (r,r) at vertical position 0 hits visible node 4r against
    // all four hidden nodes of cell-row r
    for (int r = 0; r < 8; ++r)
        for (int dj = 0; dj < 4; ++dj) CHECK(mask(4 * r, 4 * r + dj));

    // the damaged chains keep 7 members; an interior fault costs two links,
    // an end fault one
    for (int r = 0; r < 8; ++r) {
        CHECK(e.visible_chains[4 * r].size() == 7);
        std::size_t expect_links = (r == 0 || r == 7) ? 6 : 5;
        CHECK(e.visible_chain_couplers[4 * r].size() == expect_links);
    }
}

TEST_CASE("faulty chain qubit splits the chain into disconnected segments") {
    // kill the middle cell of visible node 0's chain on a 3-row grid
    ChimeraGraph g = build_chimera(3, 2, 4, {{1, 0, Side::vertical, 0}});
    Embedding e = embed_rbm(8, 8, g);
    CHECK(e.visible_chains[0].size() == 2);
    CHECK(e.visible_chain_couplers[0].empty());  // rows 0 and 2 are not adjacent
    // hidden nodes of cell-row 1 lose their crossing with visible 0
    for (int j = 4; j < 8; ++j) {
        bool missing = false;
        for (const auto& [mi, mj] : e.missing_pairs)
            if (mi == 0 && mj == j) missing = true;
        CHECK(missing);
    }
}

TEST_CASE("fault monotonicity") {
    std::vector<QubitCoord> faults;
    std::size_t prev_missing = 0;
    int prev_couplers = 1024;
    for (int r = 0; r < 4; ++r) {
        faults.push_back({2 * r, r, Side::vertical, 1});
        ChimeraGraph g = build_chimera(8, 8, 4, faults);
        Embedding e = embed_rbm(32, 32, g);
        CHECK(e.missing_pairs.size() >= prev_missing);
        CHECK(e.num_logical_couplers() <= prev_couplers);
        prev_missing = e.missing_pairs.size();
        prev_couplers = e.num_logical_couplers();
    }
}

TEST_CASE("missing mask basics") {
    ChimeraGraph g = build_chimera(2, 2, 4);
    Embedding e = embed_rbm(8, 8, g);
    MaskMatrix mask = missing_mask(e, 8, 8);
    CHECK(!mask.any());
    CHECK_THROWS_AS(missing_mask(e, 8, 7), std::invalid_argument);

    // one faulty crossing coupler: exactly one missing pair
    ChimeraGraph g2 = build_chimera(2, 2, 4, {},
                                    {{{0, 0, Side::vertical, 2}, {0, 0, Side::horizontal, 3}}});
    Embedding e2 = embed_rbm(8, 8, g2);
    MaskMatrix mask2 = missing_mask(e2, 8, 8);
    CHECK(mask2.count() == 1);
    CHECK(mask2(2, 3));
    // chains untouched
    for (const auto& chain : e2.visible_chains) CHECK(chain.size() == 2);
}
