#include "pxflow/quadrature.hpp"

#include <map>
#include <stdexcept>

namespace pxf {

namespace {

void add_centroid(QuadratureRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w * 0.5);
}

// orbit (a, a, 1-2a) and permutations
void add_orbit3(QuadratureRule& r, double a, double w) {
  const double c = 1.0 - 2.0 * a;
  r.points.push_back({a, a, c});
  r.points.push_back({c, a, a});
  r.points.push_back({a, c, a});
  for (int k = 0; k < 3; ++k) r.weights.push_back(w * 0.5);
}

// orbit (a, b, 1-a-b) and all six permutations
void add_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  for (int k = 0; k < 6; ++k) r.weights.push_back(w * 0.5);
}

// Dunavant rules (High degree efficient symmetrical Gaussian quadrature rules
// for the triangle, IJNME 21, 1985). Only the positive-weight members are
// shipped; requests in the gaps fall through to the next higher rule.
QuadratureRule make_rule(int degree) {
  QuadratureRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      add_centroid(r, 1.0);
      break;
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 4:
      add_orbit3(r, 0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
      add_orbit3(r, 0.09157621350977074345957146340220, 0.10995174365532186763832632490021);
      break;
    case 5:
      add_centroid(r, 0.225);
      add_orbit3(r, 0.47014206410511508977044120951345, 0.13239415278850618073764938783315);
      add_orbit3(r, 0.10128650732345633880098736191512, 0.12593918054482715259568394550018);
      break;
    case 6:
      add_orbit3(r, 0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
      add_orbit3(r, 0.06308901449150222834033160287082, 0.05084490637020681692093680910686);
      add_orbit6(r, 0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
                 0.08285107561837357519355345642044);
      break;
    case 8:
      add_centroid(r, 0.14431560767778716825109111048906);
      add_orbit3(r, 0.17056930775176020662229350149146, 0.10321737053471825028179155029212);
      add_orbit3(r, 0.05054722831703097545842355059660, 0.03245849762319808031092592834178);
      add_orbit3(r, 0.45929258829272315602881551449417, 0.09509163426728462479389610438858);
      add_orbit6(r, 0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
                 0.02723031417443499426484469007390);
      break;
    case 9:
      add_centroid(r, 0.09713579628279609890744676309485);
      add_orbit3(r, 0.48968251919873762778370692483619, 0.03133470022713983234393199080984);
      add_orbit3(r, 0.43708959149293663726993036443535, 0.07782754100477543338465495857972);
      add_orbit3(r, 0.18820353561903273024096128046733, 0.07964773892720910288013526957424);
      add_orbit3(r, 0.04472951339445297061024247196780, 0.02557767565869810438673914467637);
      add_orbit6(r, 0.22196298916076569567510252769319, 0.74119859878449802069007987352342,
                 0.04328353937728937728937728937729);
      break;
    case 10:
      add_centroid(r, 0.090817990382754);
      add_orbit3(r, 0.485577633383657, 0.036725957756467);
      add_orbit3(r, 0.109481575485037, 0.045321059435528);
      add_orbit6(r, 0.141707219414880, 0.307939838764121, 0.072757916845420);
      add_orbit6(r, 0.025003534762686, 0.246672560639903, 0.028327242531057);
      add_orbit6(r, 0.009540815400299, 0.066803251012200, 0.009421666963733);
      break;
    case 12:
      add_orbit3(r, 0.488217389773805, 0.025731066440455);
      add_orbit3(r, 0.439724392294460, 0.043692544538038);
      add_orbit3(r, 0.271210385012116, 0.062858224217885);
      add_orbit3(r, 0.127576145541586, 0.034796112930709);
      add_orbit3(r, 0.021317350453210, 0.006166261051559);
      add_orbit6(r, 0.115343494534698, 0.275713269685514, 0.040371557766381);
      add_orbit6(r, 0.022838332222257, 0.281325580989940, 0.022356773202303);
      add_orbit6(r, 0.025734050548330, 0.116251915907597, 0.017316231108659);
      break;
    default:
      throw std::logic_error("no quadrature table for this degree");
  }
  return r;
}

int supported_degree(int degree) {
  if (degree < 1) throw std::invalid_argument("quadrature degree must be >= 1");
  if (degree > 12) throw std::invalid_argument("quadrature degree > 12 unsupported");
  static const int table[] = {1, 2, 4, 4, 5, 6, 8, 8, 9, 10, 12, 12};
  return table[degree - 1];
}

}  // namespace

const QuadratureRule& rule(int degree) {
  const int d = supported_degree(degree);
  static std::map<int, QuadratureRule> cache;
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, make_rule(d)).first;
  return it->second;
}

MappedQuadrature map_to_element(const QuadratureRule& r, const ElementGeometry& geom) {
  if (geom.area <= 0.0) throw MeshError("map_to_element: degenerate element");
  MappedQuadrature q;
  q.points.reserve(r.size());
  q.weights.reserve(r.size());
  const double scale = 2.0 * geom.area;
  for (int i = 0; i < r.size(); ++i) {
    q.points.push_back(geom.map(r.points[i].l1, r.points[i].l2));
    q.weights.push_back(r.weights[i] * scale);
  }
  return q;
}

}  // namespace pxf
