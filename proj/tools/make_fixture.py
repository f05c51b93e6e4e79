#!/usr/bin/env python3
"""Generate the synthetic campus map used by the tests and examples.

Layout: a grid of campus buildings between lat 52.0655 and 52.0775 around
lon -0.627, an airfield (open grass) north of lat 52.0785, a few roads, one
hospital, one tall building with a height tag, and a multipolygon relation
with a courtyard. Output is deterministic.

    python3 tools/make_fixture.py > data/cranfield_synthetic.osm
"""
import random
import sys
from xml.sax.saxutils import quoteattr

rng = random.Random(20190601)
nodes = []  # (id, lat, lon)
ways = []  # (id, [node ids], {tags})
relations = []  # (id, [(type, ref, role)], {tags})
next_node = [1000000]
next_way = [2000000]


def node(lat, lon):
    nid = next_node[0]
    next_node[0] += 1
    nodes.append((nid, lat, lon))
    return nid


def way(refs, tags, wid=None):
    if wid is None:
        wid = next_way[0]
        next_way[0] += 1
    ways.append((wid, refs, tags))
    return wid


def rect(lat, lon, dlat, dlon, tags, wid=None):
    ids = [node(lat, lon), node(lat, lon + dlon), node(lat + dlat, lon + dlon), node(lat + dlat, lon)]
    return way(ids + [ids[0]], tags, wid)


# campus grid
for row in range(9):
    lat = 52.0655 + row * 0.0015
    for col in range(10):
        lon = -0.6375 + col * 0.0022
        jlat = rng.uniform(-0.0001, 0.0001)
        jlon = rng.uniform(-0.0002, 0.0002)
        rect(round(lat + jlat, 7), round(lon + jlon, 7), 0.00025, 0.0006,
             {"building": "university", "name": "Block %d%02d" % (row, col)})

# explicit fixtures with stable ids
rect(52.0752, -0.62745, 0.0003, 0.0006, {"building": "yes", "name": "Library"}, wid=3000001)
rect(52.0690, -0.6210, 0.0003, 0.0008, {"building": "hospital", "name": "Medical Centre"}, wid=3000002)
rect(52.0700, -0.6330, 0.0002, 0.0004, {"building": "yes", "name": "Tower", "height": "45 m"}, wid=3000003)
rect(52.0715, -0.6240, 0.0002, 0.0004, {"building": "hangar", "name": "Permitted Hangar"}, wid=3000004)
rect(52.0840, -0.6150, 0.0002, 0.0005, {"building": "yes", "name": "Airfield Office"}, wid=3000005)

# airfield grass north of the campus (too large to lie inside a 0.012 degree buffer)
rect(52.0785, -0.6500, 0.0150, 0.0400, {"landuse": "grass", "name": "Airfield"}, wid=3000010)
rect(52.0600, -0.6450, 0.0040, 0.0060, {"natural": "wood", "name": "Wood"}, wid=3000011)

# roads and a stream
road = [node(52.0640 + i * 0.0015, -0.6290 + (i % 2) * 0.0002) for i in range(11)]
way(road, {"highway": "secondary", "name": "College Road"}, wid=3000020)
ring_road = [node(52.0770, -0.6400 + i * 0.0025) for i in range(11)]
way(ring_road, {"highway": "service"}, wid=3000021)
stream = [node(52.0620 + i * 0.0005, -0.6420 + i * 0.0009) for i in range(15)]
way(stream, {"waterway": "stream"}, wid=3000022)

# courtyard building as a multipolygon relation
outer = rect(52.0665, -0.6180, 0.0006, 0.0010, {}, wid=3000030)
inner = rect(52.0667, -0.6177, 0.0002, 0.0004, {}, wid=3000031)
relations.append((4000001, [("way", outer, "outer"), ("way", inner, "inner")],
                  {"type": "multipolygon", "building": "yes", "name": "Courtyard Hall"}))

# untagged way (skipped on ingest)
way([node(52.0700, -0.6300), node(52.0701, -0.6301)], {})

out = sys.stdout
out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
out.write('<osm version="0.6" generator="make_fixture.py">\n')
out.write(' <bounds minlat="52.0580" minlon="-0.6520" maxlat="52.0950" maxlon="-0.6000"/>\n')
for nid, lat, lon in nodes:
    out.write(' <node id="%d" lat="%.7f" lon="%.7f"/>\n' % (nid, lat, lon))
for wid, refs, tags in ways:
    out.write(' <way id="%d">\n' % wid)
    for r in refs:
        out.write('  <nd ref="%d"/>\n' % r)
    for k, v in sorted(tags.items()):
        out.write('  <tag k=%s v=%s/>\n' % (quoteattr(k), quoteattr(v)))
    out.write(' </way>\n')
for rid, members, tags in relations:
    out.write(' <relation id="%d">\n' % rid)
    for t, ref, role in members:
        out.write('  <member type="%s" ref="%d" role="%s"/>\n' % (t, ref, role))
    for k, v in sorted(tags.items()):
        out.write('  <tag k=%s v=%s/>\n' % (quoteattr(k), quoteattr(v)))
    out.write(' </relation>\n')
out.write('</osm>\n')
