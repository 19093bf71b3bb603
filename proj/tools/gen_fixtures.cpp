// Regenerates the bundled fixtures/ dataset:
//
//   toy_corpus.jsonl   60 documents, 8-D, three well-separated clusters pushed
//                      through a fixed linear distortion
//   toy_queries.jsonl  20 query embeddings: noised copies of documents, same
//                      distortion, held out of the corpus
//   toy_eval.jsonl     the matching relevance judgments
//   qa.jsonl           10 synthetic QA records (two in the nested qa.qa shape)
//   texts.jsonl        a small {id, text} file for the embed subcommand
//
// Everything is seeded, so rerunning reproduces the files byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pairforge/jsonl.hpp"
#include "pairforge/records.hpp"
#include "pairforge/rng.hpp"

namespace {

using namespace pairforge;

struct TextLine {
  std::string id;
  std::string text;
};

constexpr std::size_t kDim = 8;
constexpr std::size_t kClusters = 3;
constexpr std::size_t kDocsPerCluster = 20;
constexpr std::size_t kQueryCount = 20;
constexpr double kCenterScale = 8.0;
constexpr double kDocNoise = 1.0;
constexpr double kQueryNoise = 0.25;
constexpr double kDistortion = 0.35;
// A large shared offset leaves Euclidean mining untouched but makes every
// raw cosine close to 1, so the projection head has real work to do.
constexpr double kOffset = 10.0;

std::vector<Vec> make_distortion(Rng& rng) {
  std::vector<Vec> a(kDim, Vec(kDim, 0.0));
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j)
      a[i][j] = (i == j ? 1.0 : 0.0) + kDistortion * rng.next_gaussian();
  }
  return a;
}

Vec apply_matrix(const std::vector<Vec>& m, const Vec& x) {
  Vec y(kDim, 0.0);
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) y[i] += m[i][j] * x[j];
  return y;
}

std::string zero_pad(std::size_t v, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*zu", width, v);
  return buf;
}

void write_toy_set(const std::filesystem::path& dir) {
  Rng noise_rng(2024, 1);
  Rng distortion_rng(2024, 2);
  Rng query_rng(2024, 3);
  const auto distortion = make_distortion(distortion_rng);

  const char* topics[kClusters] = {"sukan", "masakan", "politik"};
  std::vector<Vec> raw_points;
  Corpus corpus;
  corpus.dimension = kDim;
  for (std::size_t c = 0; c < kClusters; ++c) {
    for (std::size_t s = 0; s < kDocsPerCluster; ++s) {
      Vec p(kDim, kOffset);
      p[c] += kCenterScale;
      for (auto& x : p) x += kDocNoise * noise_rng.next_gaussian();
      raw_points.push_back(p);
      EmbeddingRecord rec;
      rec.id = "doc-" + zero_pad(corpus.records.size(), 3);
      rec.text = std::string("topik ") + topics[c] + " mesej " + zero_pad(s, 2);
      rec.vector = apply_matrix(distortion, p);
      corpus.records.push_back(std::move(rec));
    }
  }
  write_embedding_corpus((dir / "toy_corpus.jsonl").string(), corpus);

  Corpus queries;
  queries.dimension = kDim;
  std::vector<EvalQuery> eval_queries;
  for (std::size_t q = 0; q < kQueryCount; ++q) {
    const std::size_t doc = q * 3;  // spread across clusters
    Vec p = raw_points[doc];
    for (auto& x : p) x += kQueryNoise * query_rng.next_gaussian();
    EmbeddingRecord rec;
    rec.id = "q-" + zero_pad(q, 3);
    rec.text = "carian " + corpus.records[doc].text;
    rec.vector = apply_matrix(distortion, p);
    queries.records.push_back(rec);
    eval_queries.push_back({rec.id, rec.text, corpus.records[doc].id});
  }
  write_embedding_corpus((dir / "toy_queries.jsonl").string(), queries);
  write_eval_queries((dir / "toy_eval.jsonl").string(), eval_queries);
}

// The first two records keep the nested {"qa": {"qa": [...]}} shape that
// upstream QA dumps use; the rest are flat-shape synthetic records whose
// accepted answers occur verbatim in their paragraphs.
void write_qa(const std::filesystem::path& dir) {
  std::ofstream out(dir / "qa.jsonl", std::ios::trunc);

  auto nested = [](const QaRecord& rec) {
    nlohmann::ordered_json j;
    j["paragraph"] = rec.paragraph;
    if (rec.url) j["url"] = *rec.url;
    auto items = nlohmann::ordered_json::array();
    for (const auto& qa : rec.qa_items)
      items.push_back({{"question", qa.question}, {"answer", qa.answer}});
    j["qa"] = nlohmann::ordered_json::object();
    j["qa"]["qa"] = std::move(items);
    return j.dump();
  };
  auto flat = [](const QaRecord& rec) {
    nlohmann::ordered_json j;
    j["paragraph"] = rec.paragraph;
    if (rec.url) j["url"] = *rec.url;
    auto items = nlohmann::ordered_json::array();
    for (const auto& qa : rec.qa_items)
      items.push_back({{"question", qa.question}, {"answer", qa.answer}});
    j["qa"] = std::move(items);
    return j.dump();
  };

  QaRecord korra;
  korra.paragraph = "The Legend of Korra ialah ...";
  korra.url = "https://ms.wikipedia.org/wiki?curid=823980";
  korra.qa_items = {
      {"Apakah siri animasi yang ditayangkan di Nickelodeon sejak 2012?",
       "The Legend of Korra"},
      {"Siapakah pencipta siri animasi The Legend of Korra?",
       "Bryan Konietzko dan Michael Dante DiMartino"},
      {"Apakah yang dimaksudkan dengan 'bending' dalam siri animasi The Legend of Korra?",
       "Kekuatan untuk memanipulasi elemen seperti air, bumi, api, atau udara"},
      {"Siapakah Avatar Korra?",
       "Pengganti Aang dalam siri sebelumnya yang menghadapi pergolakan politik dan roh "
       "semangat dalam dunia pemodenan"},
      {"Apakah kejayaan siri The Legend of Korra?",
       "Kejayaan yang kritikal dan komersial dengan jumlah penonton tertinggi bagi siri "
       "animasi di Amerika Syarikat pada tahun 2012"},
  };
  out << nested(korra) << '\n';

  QaRecord alice;
  alice.paragraph = "adalah sebuah siri televisyen penstriman ...";
  alice.url = "https://ms.wikipedia.org/wiki?curid=1070143";
  alice.qa_items = {
      {"Apakah nama siri televisyen tersebut?", "Alice in Borderland"},
      {"Siapakah pengarah siri televisyen tersebut?", "Shinsuke Sato"},
      {"Apakah tarikh penayangan perdana siri televisyen tersebut di Netflix?",
       "10 Disember 2020"},
      {"Apakah ulasan positif yang diterima siri televisyen tersebut?",
       "visual, sinematografi, penyuntingan, dan penggunaan grafik kekerasan"},
      {"Berapa musim siri televisyen tersebut?", "Dua musim"},
  };
  out << nested(alice) << '\n';

  const std::vector<QaRecord> synthetic = {
      {"Gunung Kinabalu ialah gunung tertinggi di Malaysia dengan ketinggian 4095 meter. "
       "Gunung ini terletak di negeri Sabah dan menjadi sebahagian daripada Taman Kinabalu "
       "yang diiktiraf sebagai tapak warisan dunia UNESCO pada tahun 2000.",
       {},
       {{"Apakah gunung tertinggi di Malaysia?", "Gunung Kinabalu"},
        {"Berapakah ketinggian Gunung Kinabalu?", "4095 meter"},
        {"Di negeri manakah Gunung Kinabalu terletak?", "Sabah"},
        {"Bilakah Taman Kinabalu diiktiraf UNESCO?", "pada tahun 2000"}}},
      {"Nasi lemak ialah hidangan kebangsaan Malaysia yang dimasak dengan santan dan daun "
       "pandan. Hidangan ini biasanya dihidangkan bersama sambal, ikan bilis, kacang tanah "
       "dan telur rebus.",
       {},
       {{"Apakah hidangan kebangsaan Malaysia?", "Nasi lemak"},
        {"Dengan apakah nasi lemak dimasak?", "santan dan daun pandan"},
        {"Apakah yang dihidangkan bersama nasi lemak?",
         "sambal, ikan bilis, kacang tanah dan telur rebus"},
        {"Siapakah pencipta nasi lemak?", "Tidak diketahui secara pasti"}}},
      {"Menara Berkembar Petronas di Kuala Lumpur pernah menjadi bangunan tertinggi di "
       "dunia dari tahun 1998 hingga 2004. Menara ini mempunyai 88 tingkat dan dihubungkan "
       "oleh jambatan udara di tingkat 41 dan 42.",
       {},
       {{"Berapa tingkat Menara Berkembar Petronas?", "88 tingkat"},
        {"Di manakah Menara Berkembar Petronas terletak?", "Kuala Lumpur"},
        {"Bilakah menara itu menjadi bangunan tertinggi di dunia?",
         "dari tahun 1998 hingga 2004"}}},
      {"Sungai Pahang ialah sungai terpanjang di Semenanjung Malaysia dengan panjang 459 "
       "kilometer. Sungai ini mengalir melalui negeri Pahang dan bermuara di Laut China "
       "Selatan berhampiran Pekan.",
       {},
       {{"Apakah sungai terpanjang di Semenanjung Malaysia?", "Sungai Pahang"},
        {"Berapakah panjang Sungai Pahang?", "459 kilometer"},
        {"Di manakah Sungai Pahang bermuara?", "Laut China Selatan"}}},
      {"Wau bulan ialah sejenis layang-layang tradisional Malaysia yang terkenal di negeri "
       "Kelantan. Bentuknya menyerupai bulan sabit dan sering dihiasi dengan corak bunga "
       "yang berwarna-warni.",
       {},
       {{"Apakah wau bulan?", "layang-layang tradisional Malaysia"},
        {"Di negeri manakah wau bulan terkenal?", "Kelantan"},
        {"Apakah bentuk wau bulan?", "menyerupai bulan sabit"},
        {"Berapakah harga wau bulan?", "kira-kira lima puluh ringgit"}}},
      {"Orang utan ialah spesies mawas yang hidup di hutan hujan Borneo dan Sumatera. "
       "Haiwan ini menghabiskan kebanyakan masa di atas pokok dan memakan buah-buahan "
       "seperti durian hutan.",
       {},
       {{"Di manakah orang utan hidup?", "hutan hujan Borneo dan Sumatera"},
        {"Apakah yang dimakan oleh orang utan?", "buah-buahan seperti durian hutan"}}},
      {"Hari Merdeka disambut di Malaysia pada 31 Ogos setiap tahun bagi memperingati "
       "kemerdekaan Persekutuan Tanah Melayu pada tahun 1957. Sambutan utama diadakan di "
       "Dataran Merdeka di Kuala Lumpur.",
       {},
       {{"Bilakah Hari Merdeka disambut di Malaysia?", "31 Ogos"},
        {"Bilakah Persekutuan Tanah Melayu merdeka?", "pada tahun 1957"},
        {"Di manakah sambutan utama diadakan?", "Dataran Merdeka"}}},
      {"Batu Caves ialah sebuah bukit batu kapur yang terletak di Gombak, Selangor. Kuil "
       "Hindu di dalam gua ini menjadi tumpuan pengunjung semasa perayaan Thaipusam.",
       {},
       {}},
  };
  for (const auto& rec : synthetic) out << flat(rec) << '\n';
}

void write_texts(const std::filesystem::path& dir) {
  const std::vector<TextLine> texts = {
      {"t-00", "Selamat Tidur mutual ku semua"},
      {"t-01", "selamat tidur"},
      {"t-02", "selamat tidur katanya"},
      {"t-03", "Selamat tidur!!"},
      {"t-04", "Harga minyak naik lagi minggu ini"},
      {"t-05", "Resepi rendang ayam paling mudah"},
      {"t-06", "Perlawanan bola sepak malam tadi sangat sengit"},
      {"t-07", "Cuaca panas terik di Kuala Lumpur hari ini"},
      {"t-08", "Jom sarapan roti canai dekat kedai mamak"},
      {"t-09", "Keputusan peperiksaan akan diumumkan esok"},
      {"t-10", "Jalan sesak teruk waktu pagi tadi"},
      {"t-11", "Filem baru tu memang best sangat"},
  };
  std::ofstream out(dir / "texts.jsonl", std::ios::trunc);
  for (const auto& t : texts) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["text"] = t.text;
    out << j.dump() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
  std::filesystem::create_directories(dir);
  write_toy_set(dir);
  write_qa(dir);
  write_texts(dir);
  std::printf("fixtures written to %s\n", dir.string().c_str());
  return 0;
}
