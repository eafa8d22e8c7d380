#include "wqn/wavelet.hpp"

#include <cmath>
#include <stdexcept>

namespace wqn {

namespace {

// Scaling (decomposition low-pass) filters, orders 2..10.
const std::vector<std::vector<double>> kDaubechies = {
    // db2
    {-0.12940952255126037, 0.2241438680420134, 0.8365163037378079,
        0.48296291314453416},
    // db3
    {0.03522629188570953, -0.08544127388202666, -0.13501102001025458,
        0.45987750211849154, 0.8068915093110925, 0.33267055295008263},
    // db4
    {-0.010597401785069032, 0.0328830116668852, 0.030841381835560764,
        -0.18703481171909309, -0.027983769416859854, 0.6308807679298589,
        0.7148465705529157, 0.2303778133088965},
    // db5
    {0.0033357252854737712, -0.012580751999081999, -0.006241490212798274,
        0.07757149384004572, -0.032244869584638375, -0.24229488706638203,
        0.13842814590132074, 0.7243085284377729, 0.6038292697971896,
        0.16010239797419293},
    // db6
    {-0.0010773010853084796, 0.004777257510945511, 0.0005538422011614961,
        -0.03158203931748603, 0.027522865530305727, 0.09750160558732304,
        -0.12976686756726194, -0.22626469396543983, 0.31525035170919763,
        0.7511339080210954, 0.49462389039845306, 0.11154074335010947},
    // db7
    {0.00035371379997452024, -0.0018016407040474908, 0.0004295779729213665,
        0.01255099855609984, -0.01657454163066688, -0.03802993693501441,
        0.08061260915108308, 0.07130921926683026, -0.22403618499387498,
        -0.14390600392856498, 0.4697822874051931, 0.7291320908462351,
        0.3965393194819173, 0.07785205408500918},
    // db8
    {-0.00011747678412476953, 0.0006754494064505693, -0.00039174037337694705,
        -0.004870352993451574, 0.008746094047405777, 0.013981027917398282,
        -0.044088253930794755, -0.017369301001807547, 0.12874742662047847,
        0.0004724845739132828, -0.2840155429615469, -0.015829105256349306,
        0.5853546836542067, 0.6756307362972898, 0.31287159091429995,
        0.05441584224310401},
    // db9
    {3.93473203162716e-05, -0.0002519631889427101, 0.00023038576352319597,
        0.0018476468830562265, -0.00428150368246343, -0.004723204757751397,
        0.022361662123679096, 0.00025094711483145197, -0.06763282906132997,
        0.03072568147933338, 0.14854074933810638, -0.09684078322297646,
        -0.2932737832791749, 0.13319738582500756, 0.6572880780513005,
        0.6048231236901112, 0.24383467461259034, 0.038077947363878345},
    // db10
    {-1.3264202894521244e-05, 9.358867032006959e-05, -0.00011646685512928545,
        -0.0006858566949597116, 0.001992405295185056, 0.001395351747052901,
        -0.010733175483330575, 0.0036065535669561697, 0.033212674059341,
        -0.029457536821875813, -0.07139414716639708, 0.09305736460357235,
        0.12736934033579325, -0.19594627437737705, -0.24984642432731538,
        0.2811723436605775, 0.6884590394536035, 0.5272011889317256,
        0.1881768000776915, 0.026670057900555554},
};

const std::vector<std::vector<double>> kSymlets = {
    // sym2
    {-0.12940952255092145, 0.22414386804185735, 0.836516303737469,
        0.48296291314469025},
    // sym3
    {0.035226291882100656, -0.08544127388224149, -0.13501102001039084,
        0.4598775021193313, 0.8068915093133388, 0.3326705529509569},
    // sym4
    {-0.07576571478927333, -0.02963552764599851, 0.49761866763201545,
        0.8037387518059161, 0.29785779560527736, -0.09921954357684722,
        -0.012603967262037833, 0.0322231006040427},
    // sym5
    {0.027333068345077982, 0.029519490925774643, -0.039134249302383094,
        0.1993975339773936, 0.7234076904024206, 0.6339789634582119,
        0.01660210576452232, -0.17532808990845047, -0.021101834024758855,
        0.019538882735286728},
    // sym6
    {0.015404109327027373, 0.0034907120842174702, -0.11799011114819057,
        -0.048311742585633, 0.4910559419267466, 0.787641141030194,
        0.3379294217276218, -0.07263752278646252, -0.021060292512300564,
        0.04472490177066578, 0.0017677118642428036, -0.007800708325034148},
    // sym7
    {0.002681814568257878, -0.0010473848886829163, -0.01263630340325193,
        0.03051551316596357, 0.0678926935013727, -0.049552834937127255,
        0.017441255086855827, 0.5361019170917628, 0.767764317003164,
        0.2886296317515146, -0.14004724044296152, -0.10780823770381774,
        0.004010244871533663, 0.010268176708511255},
    // sym8
    {-0.0033824159510061256, -0.0005421323317911481, 0.03169508781149298,
        0.007607487324917605, -0.1432942383508097, -0.061273359067658524,
        0.4813596512583722, 0.7771857517005235, 0.3644418948353314,
        -0.05194583810770904, -0.027219029917056003, 0.049137179673607506,
        0.003808752013890615, -0.01495225833704823, -0.0003029205147213668,
        0.0018899503327594609},
    // sym9
    {0.0014009155259146807, 0.0006197808889855868, -0.013271967781817119,
        -0.01152821020767923, 0.03022487885827568, 0.0005834627461258068,
        -0.05456895843083407, 0.238760914607303, 0.717897082764412,
        0.6173384491409358, 0.035272488035271894, -0.19155083129728512,
        -0.018233770779395985, 0.06207778930288603, 0.008859267493400484,
        -0.010264064027633142, -0.0004731544986800831, 0.0010694900329086053},
    // sym10
    {0.0007701598091144901, 9.563267072289475e-05, -0.008641299277022422,
        -0.0014653825813050513, 0.0459272392310922, 0.011609893903711381,
        -0.15949427888491757, -0.07088053578324385, 0.47169066693843925,
        0.7695100370211071, 0.38382676106708546, -0.03553674047381755,
        -0.0319900568824278, 0.04999497207737669, 0.005764912033581909,
        -0.02035493981231129, -0.0008043589320165449, 0.004593173585311828,
        5.7036083618494284e-05, -0.0004593294210046588},
};

constexpr int kMinOrder = 2;
constexpr int kMaxOrder = 10;

}  // namespace

std::string_view to_string(BoundaryMode mode) {
  return mode == BoundaryMode::Symmetric ? "symmetric" : "periodic";
}

BoundaryMode boundary_from_string(std::string_view name) {
  if (name == "symmetric") return BoundaryMode::Symmetric;
  if (name == "periodic" || name == "periodization") return BoundaryMode::Periodic;
  throw std::invalid_argument("unknown boundary mode '" + std::string(name) + "'");
}

WaveletSpec::WaveletSpec(WaveletFamily family, int order, std::vector<double> dec_lo)
    : family_(family), order_(order), dec_lo_(std::move(dec_lo)) {
  const std::size_t taps = dec_lo_.size();
  dec_hi_.resize(taps);
  rec_lo_.resize(taps);
  rec_hi_.resize(taps);
  for (std::size_t k = 0; k < taps; ++k) {
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    dec_hi_[k] = sign * dec_lo_[taps - 1 - k];
  }
  for (std::size_t k = 0; k < taps; ++k) {
    rec_lo_[k] = dec_lo_[taps - 1 - k];
    rec_hi_[k] = dec_hi_[taps - 1 - k];
  }
  if (orthogonality_defect(*this) > 1e-10) {
    throw std::logic_error("wavelet " + name() + ": filter taps fail the orthogonality check");
  }
}

WaveletSpec WaveletSpec::daubechies(int vanishing_moments) {
  if (vanishing_moments < kMinOrder || vanishing_moments > kMaxOrder) {
    throw std::invalid_argument("daubechies order must be in [2, 10]");
  }
  return WaveletSpec(WaveletFamily::Daubechies, vanishing_moments,
                     kDaubechies[vanishing_moments - kMinOrder]);
}

WaveletSpec WaveletSpec::symlet(int vanishing_moments) {
  if (vanishing_moments < kMinOrder || vanishing_moments > kMaxOrder) {
    throw std::invalid_argument("symlet order must be in [2, 10]");
  }
  return WaveletSpec(WaveletFamily::Symlet, vanishing_moments,
                     kSymlets[vanishing_moments - kMinOrder]);
}

WaveletSpec WaveletSpec::from_name(std::string_view name) {
  auto parse_order = [&](std::string_view digits) {
    if (digits.empty() || digits.size() > 2) return -1;
    int value = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return -1;
      value = value * 10 + (c - '0');
    }
    return value;
  };
  int order = -1;
  if (name.starts_with("sym")) {
    order = parse_order(name.substr(3));
    if (order >= kMinOrder && order <= kMaxOrder) return symlet(order);
  } else if (name.starts_with("db")) {
    order = parse_order(name.substr(2));
    if (order >= kMinOrder && order <= kMaxOrder) return daubechies(order);
  }
  throw std::invalid_argument("unknown wavelet '" + std::string(name) +
                              "' (expected db2..db10 or sym2..sym10)");
}

std::string WaveletSpec::name() const {
  return (family_ == WaveletFamily::Symlet ? "sym" : "db") + std::to_string(order_);
}

double orthogonality_defect(const WaveletSpec& wavelet) {
  const auto& h = wavelet.dec_lo();
  const auto& g = wavelet.dec_hi();
  const int taps = wavelet.filter_length();
  double defect = 0.0;
  double sum = 0.0;
  for (double t : h) sum += t;
  defect = std::max(defect, std::abs(sum - std::sqrt(2.0)));
  for (int shift = 0; 2 * shift < taps; ++shift) {
    double hh = 0.0, gg = 0.0, hg = 0.0;
    for (int k = 0; k + 2 * shift < taps; ++k) {
      hh += h[k] * h[k + 2 * shift];
      gg += g[k] * g[k + 2 * shift];
      hg += h[k] * g[k + 2 * shift];
    }
    const double expected = shift == 0 ? 1.0 : 0.0;
    defect = std::max({defect, std::abs(hh - expected), std::abs(gg - expected)});
    // Cross-orthogonality in both shift directions.
    double gh = 0.0;
    for (int k = 0; k + 2 * shift < taps; ++k) gh += g[k] * h[k + 2 * shift];
    defect = std::max({defect, std::abs(hg), std::abs(gh)});
  }
  for (int k = 0; k < taps; ++k) {
    const double mirror = ((k % 2 == 0) ? -1.0 : 1.0) * h[taps - 1 - k];
    defect = std::max(defect, std::abs(g[k] - mirror));
  }
  return defect;
}

Index coefficient_length(Index n, int filter_length, BoundaryMode mode) {
  if (mode == BoundaryMode::Symmetric) return (n + filter_length - 1) / 2;
  return (n + 1) / 2;
}

std::vector<Index> level_lengths(Index n, int filter_length, int levels, BoundaryMode mode) {
  std::vector<Index> lengths{n};
  lengths.reserve(levels + 1);
  for (int m = 0; m < levels; ++m) {
    lengths.push_back(coefficient_length(lengths.back(), filter_length, mode));
  }
  return lengths;
}

int default_levels(Index n, const WaveletSpec& wavelet, BoundaryMode mode, int cap) {
  const int taps = wavelet.filter_length();
  if (n < taps) return 0;
  int levels = 0;
  Index len = n;
  while (levels < cap) {
    const Index next = coefficient_length(len, taps, mode);
    if (next < taps || next >= len) break;
    len = next;
    ++levels;
  }
  return levels;
}

namespace detail {

void check_decompose_args(Index n, const WaveletSpec& wavelet, int levels, BoundaryMode mode) {
  if (levels < 1) throw std::invalid_argument("decompose: levels must be >= 1");
  if (n < wavelet.filter_length()) {
    throw std::invalid_argument("decompose: signal of " + std::to_string(n) +
                                " samples is shorter than the " + wavelet.name() + " filter");
  }
  // Every level must shrink its input; otherwise the request exceeds the
  // resolution the signal supports.
  Index len = n;
  for (int m = 1; m <= levels; ++m) {
    const Index next = coefficient_length(len, wavelet.filter_length(), mode);
    if (next < 1 || (m > 1 && next >= len)) {
      throw std::invalid_argument("decompose: " + std::to_string(levels) +
                                  " levels are infeasible for " + std::to_string(n) +
                                  " samples");
    }
    len = next;
  }
}

void throw_non_finite() { throw std::invalid_argument("decompose: non-finite input samples"); }

void throw_inconsistent(const std::string& what) {
  throw std::invalid_argument("reconstruct: inconsistent coefficient lengths (" + what + ")");
}

}  // namespace detail

}  // namespace wqn
