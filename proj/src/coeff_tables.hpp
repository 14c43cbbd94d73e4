#pragma once

// Diagonal-norm SBP coefficient tables, stored as exact rationals and
// converted to floating point once at assembly. Layout per order:
//   p_weights   boundary entries of P/h (interior weight is 1)
//   q_block     boundary block of Q, rows 0..nb-1, cols 0..wb-1; the lower
//               right block is the mirror Q[n-1-i][n-1-j] = -Q[i][j]
//   q_interior  centered interior stencil of Q (antisymmetric)
//   d2_block    boundary block of h^2 * D2; mirrors evenly (no sign flip)
//   d2_interior centered interior stencil of h^2 * D2
//   s_row       one-sided first-derivative row of h * S at the left edge;
//               the right edge row is index-reversed with flipped signs
// The test suite re-verifies every table algebraically, so a transcription
// error here cannot survive.

#include <vector>

namespace sbpsat::tables {

struct Rational {
  long long num;
  long long den;
  double value() const { return double(num) / double(den); }
};

struct OrderTable {
  int p;
  std::vector<Rational> p_weights;
  std::vector<std::vector<Rational>> q_block;
  std::vector<Rational> q_interior;
  std::vector<std::vector<Rational>> d2_block;
  std::vector<Rational> d2_interior;
  std::vector<Rational> s_row;
};

inline const OrderTable& order_table(int p) {
  static const OrderTable t2 = {
      2,
      {{1, 2}},
      {{{-1, 2}, {1, 2}}},
      {{-1, 2}, {0, 1}, {1, 2}},
      {{{1, 1}, {-2, 1}, {1, 1}}},
      {{1, 1}, {-2, 1}, {1, 1}},
      {{-3, 2}, {2, 1}, {-1, 2}},
  };
  static const OrderTable t4 = {
      4,
      {{17, 48}, {59, 48}, {43, 48}, {49, 48}},
      {
          {{-1, 2}, {59, 96}, {-1, 12}, {-1, 32}, {0, 1}, {0, 1}},
          {{-59, 96}, {0, 1}, {59, 96}, {0, 1}, {0, 1}, {0, 1}},
          {{1, 12}, {-59, 96}, {0, 1}, {59, 96}, {-1, 12}, {0, 1}},
          {{1, 32}, {0, 1}, {-59, 96}, {0, 1}, {2, 3}, {-1, 12}},
      },
      {{1, 12}, {-2, 3}, {0, 1}, {2, 3}, {-1, 12}},
      {
          {{2, 1}, {-5, 1}, {4, 1}, {-1, 1}, {0, 1}, {0, 1}},
          {{1, 1}, {-2, 1}, {1, 1}, {0, 1}, {0, 1}, {0, 1}},
          {{-4, 43}, {59, 43}, {-110, 43}, {59, 43}, {-4, 43}, {0, 1}},
          {{-1, 49}, {0, 1}, {59, 49}, {-118, 49}, {64, 49}, {-4, 49}},
      },
      {{-1, 12}, {4, 3}, {-5, 2}, {4, 3}, {-1, 12}},
      {{-11, 6}, {3, 1}, {-3, 2}, {1, 3}},
  };
  static const OrderTable t6 = {
      6,
      {{13649, 43200},
       {12013, 8640},
       {2711, 4320},
       {5359, 4320},
       {7877, 8640},
       {43801, 43200}},
      {
          {{-1, 2}, {11683, 16200}, {-18643, 51840}, {4753, 14400},
           {-73069, 259200}, {11701, 129600}, {0, 1}, {0, 1}, {0, 1}},
          {{-11683, 16200}, {0, 1}, {10253, 8640}, {-62971, 51840},
           {9373, 8640}, {-28999, 86400}, {0, 1}, {0, 1}, {0, 1}},
          {{18643, 51840}, {-10253, 8640}, {0, 1}, {25337, 12960},
           {-27457, 17280}, {3983, 8640}, {0, 1}, {0, 1}, {0, 1}},
          {{-4753, 14400}, {62971, 51840}, {-25337, 12960}, {0, 1},
           {7427, 5184}, {-98231, 259200}, {1, 60}, {0, 1}, {0, 1}},
          {{73069, 259200}, {-9373, 8640}, {27457, 17280}, {-7427, 5184},
           {0, 1}, {39, 50}, {-3, 20}, {1, 60}, {0, 1}},
          {{-11701, 129600}, {28999, 86400}, {-3983, 8640}, {98231, 259200},
           {-39, 50}, {0, 1}, {3, 4}, {-3, 20}, {1, 60}},
      },
      {{-1, 60}, {3, 20}, {-3, 4}, {0, 1}, {3, 4}, {-3, 20}, {1, 60}},
      {
          {{38854, 13649}, {-1362161, 163788}, {360329, 40947},
           {-108279, 27298}, {23201, 40947}, {11467, 163788}, {0, 1}, {0, 1},
           {0, 1}},
          {{711439, 720780}, {-72746, 36039}, {28921, 24026},
           {-13349, 36039}, {38711, 144156}, {-4227, 60065}, {0, 1}, {0, 1},
           {0, 1}},
          {{-28471, 81330}, {28921, 10844}, {-42026, 8133}, {65075, 16266},
           {-7683, 5422}, {43387, 162660}, {0, 1}, {0, 1}, {0, 1}},
          {{6921, 107180}, {-13349, 32154}, {65075, 32154}, {-17338, 5359},
           {112267, 64308}, {-30979, 160770}, {48, 5359}, {0, 1}, {0, 1}},
          {{-9199, 118155}, {38711, 94524}, {-7683, 7877}, {112267, 47262},
           {-75944, 23631}, {257477, 157540}, {-1296, 7877}, {96, 7877},
           {0, 1}},
          {{11467, 525612}, {-4227, 43801}, {43387, 262806},
           {-30979, 131403}, {257477, 175204}, {-8, 3}, {64800, 43801},
           {-6480, 43801}, {480, 43801}},
      },
      {{1, 90}, {-3, 20}, {3, 2}, {-49, 18}, {3, 2}, {-3, 20}, {1, 90}},
      {{-25, 12}, {4, 1}, {-3, 1}, {4, 3}, {-1, 4}},
  };
  switch (p) {
    case 2: return t2;
    case 4: return t4;
    default: return t6;
  }
}

}  // namespace sbpsat::tables
