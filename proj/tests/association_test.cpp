#include <doctest.h>

#include <glmb/association.hpp>

using glmb::Assignment;
using glmb::AssociationArray;
using glmb::Label;

TEST_CASE("cell encoding round-trips every cell") {
  AssociationArray a(2, {2, 3});
  REQUIRE(a.cell_count() == 13);  // 1 + 3 * 4
  for (std::size_t c = 0; c < a.cell_count(); ++c) {
    a.set_row_cell(0, c);
    CHECK(a.row_cell(0) == c);
    CHECK(a.row_kept(0) == (c != 0));
  }
}

TEST_CASE("cell order puts the dropped row first and the last sensor fastest") {
  AssociationArray a(1, {2, 3});
  a.set_row_cell(0, 0);
  CHECK(a(0, 0) == -1);
  CHECK(a(0, 1) == -1);
  a.set_row_cell(0, 1);
  CHECK(a(0, 0) == 0);
  CHECK(a(0, 1) == 0);
  a.set_row_cell(0, 2);
  CHECK(a(0, 0) == 0);
  CHECK(a(0, 1) == 1);
  a.set_row_cell(0, 5);
  CHECK(a(0, 0) == 1);
  CHECK(a(0, 1) == 0);
  a.set_row_cell(0, 12);
  CHECK(a(0, 0) == 2);
  CHECK(a(0, 1) == 3);
}

TEST_CASE("construction and entry ranges are validated") {
  CHECK_THROWS_AS(AssociationArray(-1, {1}), glmb::invalid_argument);
  CHECK_THROWS_AS(AssociationArray(1, {}), glmb::invalid_argument);
  CHECK_THROWS_AS(AssociationArray(1, {-2}), glmb::invalid_argument);

  AssociationArray a(1, {2});
  a(0, 0) = 3;  // M = 2, so 3 is out of range
  CHECK_THROWS_AS(a.check_entry_range(), glmb::invalid_argument);
  CHECK_THROWS_AS(is_positive_one_one(a), glmb::invalid_argument);
  a(0, 0) = -2;
  CHECK_THROWS_AS(a.check_entry_range(), glmb::invalid_argument);
}

TEST_CASE("the direct validity check spots conflicts and mixed rows") {
  AssociationArray a(2, {2, 2});

  // Both dropped.
  CHECK(is_positive_one_one(a));

  // Shared miss entries are fine.
  a(0, 0) = 0;
  a(0, 1) = 0;
  a(1, 0) = 0;
  a(1, 1) = 0;
  CHECK(is_positive_one_one(a));

  // Distinct positives are fine.
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 2;
  a(1, 1) = 1;
  CHECK(is_positive_one_one(a));

  // Shared positive at sensor 0.
  a(1, 0) = 1;
  CHECK_FALSE(is_positive_one_one(a));

  // Mixed row: kept at sensor 0, dropped at sensor 1.
  a(1, 0) = 2;
  a(1, 1) = -1;
  CHECK_FALSE(is_positive_one_one(a));
}

TEST_CASE("the factorized indicator matches the direct check row by row") {
  // Every array whose rows are individually all-or-nothing, for all problem
  // sizes up to 3 rows, 2 sensors and 2 measurements per sensor.
  long checked = 0;
  for (int sensors = 1; sensors <= 2; ++sensors) {
    std::vector<int> sizes(static_cast<std::size_t>(sensors), 0);
    while (true) {
      for (int rows = 1; rows <= 3; ++rows) {
        AssociationArray a(rows, sizes);
        const std::size_t cells = a.cell_count();
        std::vector<std::size_t> pick(static_cast<std::size_t>(rows), 0);
        while (true) {
          for (int i = 0; i < rows; ++i)
            a.set_row_cell(i, pick[static_cast<std::size_t>(i)]);
          const double direct = is_positive_one_one(a) ? 1.0 : 0.0;
          for (int n = 0; n < rows; ++n) {
            CHECK(indicator_factorization_check(a, n) == direct);
            ++checked;
          }
          int carry = rows - 1;
          while (carry >= 0 && ++pick[static_cast<std::size_t>(carry)] == cells)
            pick[static_cast<std::size_t>(carry--)] = 0;
          if (carry < 0) break;
        }
      }
      int s = sensors - 1;
      while (s >= 0 && ++sizes[static_cast<std::size_t>(s)] == 3)
        sizes[static_cast<std::size_t>(s--)] = 0;
      if (s < 0) break;
    }
  }
  // Sum over problem sizes of rows * cells^rows.
  CHECK(checked == 6966);
}

TEST_CASE("the factorized indicator sees mixed rows other than its anchor") {
  AssociationArray a(2, {2, 2});
  a(0, 0) = 1;
  a(0, 1) = 1;
  a(1, 0) = 1;  // mixed: kept at sensor 0 only
  CHECK(indicator_factorization_check(a, 0) == 0.0);

  // Anchored at the mixed row itself the factorization cannot see the
  // mixedness; callers must keep the anchored row all-or-nothing.
  a(1, 0) = 2;
  CHECK(indicator_factorization_check(a, 1) == 1.0);
  CHECK_FALSE(is_positive_one_one(a));

  CHECK_THROWS_AS(indicator_factorization_check(a, 2), glmb::invalid_argument);
  CHECK_THROWS_AS(indicator_factorization_check(a, -1), glmb::invalid_argument);
}

TEST_CASE("convert and from_assignments are mutually inverse") {
  const std::vector<Label> labels = {{0, 0}, {0, 1}, {1, 0}};
  AssociationArray a(3, {2, 2});
  a(0, 0) = 1;
  a(0, 1) = 0;
  a(2, 0) = 2;
  a(2, 1) = 1;

  const std::vector<Assignment> got = convert(a, labels);
  REQUIRE(got.size() == 2);
  CHECK(got[0].label == Label{0, 0});
  CHECK(got[0].measurements == std::vector<int>{1, 0});
  CHECK(got[1].label == Label{1, 0});
  CHECK(got[1].measurements == std::vector<int>{2, 1});

  CHECK(from_assignments(labels, {2, 2}, got) == a);
}

TEST_CASE("conversion rejects malformed inputs") {
  const std::vector<Label> labels = {{0, 0}, {0, 1}};
  AssociationArray a(2, {1});
  a(0, 0) = 1;
  a(1, 0) = 1;  // conflict
  CHECK_THROWS_AS(convert(a, labels), glmb::invalid_argument);
  CHECK_THROWS_AS(convert(a, {Label{0, 0}}), glmb::invalid_argument);

  Assignment stranger{{7, 7}, {1}};
  CHECK_THROWS_AS(from_assignments(labels, {1}, {stranger}),
                  glmb::invalid_argument);
  Assignment short_tuple{{0, 0}, {}};
  CHECK_THROWS_AS(from_assignments(labels, {1}, {short_tuple}),
                  glmb::invalid_argument);
}
