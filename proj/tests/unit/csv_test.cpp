#include <gtest/gtest.h>

#include <sstream>

#include "bikeclust/csv.hpp"
#include "bikeclust/error.hpp"

using namespace bikeclust;

TEST(Csv, QuotedFieldsAndEscapedQuotes) {
    std::istringstream in("a,b,c\n1,\"x, y\",\"say \"\"hi\"\"\"\r\n\n2,,\"multi\nline\"\n");
    csv::Reader r(in);
    auto header = r.next();
    ASSERT_TRUE(header);
    EXPECT_EQ(header->fields.size(), 3u);
    auto row = r.next();
    ASSERT_TRUE(row);
    EXPECT_EQ(row->line, 2u);
    EXPECT_EQ(row->fields[1], "x, y");
    EXPECT_EQ(row->fields[2], "say \"hi\"");
    row = r.next();
    ASSERT_TRUE(row);
    EXPECT_EQ(row->line, 4u);
    EXPECT_EQ(row->fields[1], "");
    EXPECT_EQ(row->fields[2], "multi\nline");
    EXPECT_FALSE(r.next());
}

TEST(Csv, UnterminatedQuoteThrows) {
    std::istringstream in("a\n\"open\n");
    csv::Reader r(in);
    r.next();
    EXPECT_THROW(r.next(), Error);
}

TEST(Csv, ByteOrderMarkIsStripped) {
    std::istringstream in("\xEF\xBB\xBF" "date,count\n");
    csv::Reader r(in);
    EXPECT_EQ(r.next()->fields[0], "date");
}

TEST(Csv, NumberParsing) {
    EXPECT_EQ(csv::parse_double(" 2.5 "), 2.5);
    EXPECT_EQ(csv::parse_double("+1e3"), 1000.0);
    EXPECT_FALSE(csv::parse_double("abc"));
    EXPECT_FALSE(csv::parse_double("1.2.3"));
    EXPECT_FALSE(csv::parse_double(""));
    EXPECT_FALSE(csv::parse_double("nan"));
    EXPECT_EQ(csv::parse_integer("60"), 60);
    EXPECT_FALSE(csv::parse_integer("60.5"));
}

TEST(Csv, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 12.9099, -1e-300, 123456789.123456789}) {
        EXPECT_EQ(*csv::parse_double(csv::format_double(v)), v);
    }
    EXPECT_EQ(csv::format_double(0.1), "0.1");
}

TEST(Csv, EscapeQuotesOnlyWhenNeeded) {
    EXPECT_EQ(csv::escape("plain"), "plain");
    EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv::escape("a\"b"), "\"a\"\"b\"");
}
