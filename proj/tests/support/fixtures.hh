#pragma once

#include <cstddef>

#include "tokautoma/core.hh"
#include "tokautoma/token_dfa.hh"
#include "tokautoma/transducer.hh"

namespace fixtures {

using namespace tokautoma;

// Token DFA for {a|b|c, a|bc}: q0 -a-> q1 -b-> q2 -c-> q3, q1 -bc-> q4; q3, q4 accepting.
TokenDfa fig1();

// Construction example over {a,b} with D = [a|a, b|a].
TokenDfa fig2_a0();
TokenDfa fig2_a1();
TokenDfa fig2_a2();
Dictionary fig2_dictionary();

// Unique tokenizations but not context-invariant: loop a at q0, q0 -aa-> q1, q1 accepting.
TokenDfa fig3();

// D = [ab|a, a|b], not proper.
Dictionary fig4_dictionary();

// D_k = [a|a, aa|aa, ..., a^(2^(k-1)) | a^(2^(k-1))].
Dictionary fig5_dictionary(std::size_t k);

// Subsequential machine for [a|a] over {a,b}: q0 -a|-> q1, q0 -b|b-> q0,
// q1 -a|aa-> q0, q1 -b|a,b-> q0; F(q0) = empty, F(q1) = a.
SubsequentialTransducer fig6b();

// [a|a, a|b, b|c, ab|c, bc|ab]
Dictionary example1_dictionary();

} // namespace fixtures
