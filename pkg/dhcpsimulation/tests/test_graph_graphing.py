import json

import pytest

from ..packages.graph import network as roadnet
from ..packages.graph.graphing import base
from ..packages.graph.graphing.base import Approach, Movement


class TestTurns:
    def test_turn_from_north(self):
        assert base.turn_between(Approach.N, Approach.S) == Movement.STRAIGHT
        assert base.turn_between(Approach.N, Approach.E) == Movement.LEFT
        assert base.turn_between(Approach.N, Approach.W) == Movement.RIGHT

    def test_turn_from_west(self):
        assert base.turn_between(Approach.W, Approach.E) == Movement.STRAIGHT
        assert base.turn_between(Approach.W, Approach.N) == Movement.LEFT
        assert base.turn_between(Approach.W, Approach.S) == Movement.RIGHT

    def test_u_turn(self):
        with pytest.raises(ValueError):
            base.turn_between(Approach.E, Approach.E)

    def test_exit_side_inverts_turn(self):
        for arrival in Approach:
            for movement in Movement:
                exit = base.exit_side(arrival, movement)
                assert base.turn_between(arrival, exit) == movement


class TestConnections:
    @pytest.fixture
    def two_nodes(self):
        source = base.Boundary("Source", 0.0, 100.0)
        sink = base.Intersection("Sink", 0.0, 0.0)
        road = base.Road("Road", 100.0)
        road.source = source
        road.sink = sink
        source.add_outlet(road)
        sink.add_inlet(road)
        return({"source": source, "sink": sink, "road": road})

    def test_inlet_side(self, two_nodes):
        assert two_nodes["sink"].inlet_side(two_nodes["road"]) == Approach.N

    def test_outlet_side(self, two_nodes):
        assert two_nodes["source"].outlet_side(two_nodes["road"]) == \
            Approach.S

    def test_connected_road(self, two_nodes):
        assert two_nodes["road"].source is two_nodes["source"]
        assert two_nodes["road"].sink is two_nodes["sink"]

    def test_null_source(self):
        with pytest.raises(AttributeError):
            base.Road("Loose", 10.0).source

    def test_string_repr_null_connections(self):
        assert "broken" in str(base.Road("Loose", 10.0)).lower()

    def test_string_repr_connection(self, two_nodes):
        text = str(two_nodes["road"])
        assert "Source" in text and "Sink" in text

    def test_occupied_side_rejected(self, two_nodes):
        other = base.Boundary("Other", 0.0, 50.0)
        road = base.Road("Second", 50.0)
        road.source = other
        road.sink = two_nodes["sink"]
        with pytest.raises(ValueError, match="Sink.*Road.*Second"):
            two_nodes["sink"].add_inlet(road)
        assert two_nodes["sink"].inlets[Approach.N] is two_nodes["road"]

    def test_detach(self, two_nodes):
        two_nodes["sink"].detach(two_nodes["road"])
        assert two_nodes["sink"].inlets == {}

    def test_incomplete_intersection(self, two_nodes):
        with pytest.raises(ValueError, match="Sink"):
            two_nodes["sink"].validate()


class TestLanes:
    def test_lane_ids(self):
        road = base.Road("road_a", 300.0)
        assert [lane.id for lane in road.lanes] == \
            ["road_a_0", "road_a_1", "road_a_2"]

    def test_capacity(self):
        assert base.Road("road_a", 300.0).lanes[0].capacity() == 40
        assert base.Road("road_b", 100.0).lanes[0].capacity() == 13
        assert base.Road("road_c", 300.0).lanes[0].capacity(15.0) == 20

    def test_negative_length(self):
        with pytest.raises(ValueError):
            base.Road("road_a", -1.0)

    def test_empty_id(self):
        with pytest.raises(TypeError):
            base.Road("", 10.0)


class TestGrid:
    @pytest.fixture
    def grid(self):
        return(roadnet.build_grid(2, 2, 300.0, 200.0))

    def test_counts(self, grid):
        assert len(grid.intersections) == 4
        assert len(grid.boundaries) == 8
        # 12 links built in both directions
        assert len(grid.roads) == 24
        assert len(grid.lanes) == 72

    def test_intersection_positions(self, grid):
        node = grid.nodes["intersection_1_1"]
        assert (node.x, node.y) == (200.0, -300.0)

    def test_intersections_complete(self, grid):
        for node in grid.intersections:
            assert len(node.incoming_lanes()) == 12

    def test_canonical_lane_order(self, grid):
        node = grid.nodes["intersection_0_0"]
        lanes = node.incoming_lanes()
        assert lanes[0].road.id == "road_boundary_N_0_to_intersection_0_0"
        assert lanes[0].movement == Movement.STRAIGHT
        assert lanes[4].road.id == "road_intersection_0_1_to_intersection_0_0"
        assert lanes[4].movement == Movement.LEFT

    def test_turn(self, grid):
        road_in = grid.roads["road_boundary_N_0_to_intersection_0_0"]
        road_out = grid.roads["road_intersection_0_0_to_intersection_0_1"]
        assert grid.turn(road_in, road_out) == Movement.LEFT

    def test_u_turn_rejected(self, grid):
        road_in = grid.roads["road_boundary_N_0_to_intersection_0_0"]
        road_out = grid.roads["road_intersection_0_0_to_boundary_N_0"]
        with pytest.raises(ValueError, match="U-turn"):
            grid.turn(road_in, road_out)

    def test_boundary_pass_through_rejected(self, grid):
        road_in = grid.roads["road_intersection_0_0_to_boundary_N_0"]
        road_out = grid.roads["road_boundary_N_0_to_intersection_0_0"]
        with pytest.raises(ValueError, match="boundary"):
            grid.turn(road_in, road_out)

    def test_downstream_road(self, grid):
        lane = grid.roads["road_boundary_W_0_to_intersection_0_0"].lane(
            Movement.STRAIGHT)
        assert grid.downstream_road(lane).id == \
            "road_intersection_0_0_to_intersection_0_1"

    def test_downstream_of_exit_road(self, grid):
        lane = grid.roads["road_intersection_0_0_to_boundary_N_0"].lanes[0]
        assert grid.downstream_road(lane) is None

    def test_unknown_lane(self, grid):
        with pytest.raises(KeyError):
            grid.lane("no_such_lane")

    def test_straight_path(self, grid):
        entry = grid.roads["road_boundary_W_1_to_intersection_1_0"]
        assert roadnet.straight_path(grid, entry) == [
            "road_boundary_W_1_to_intersection_1_0",
            "road_intersection_1_0_to_intersection_1_1",
            "road_intersection_1_1_to_boundary_E_1"]

    def test_entry_roads(self, grid):
        entries = roadnet.entry_roads(grid)
        assert len(entries) == 8
        axes = [roadnet.travel_axis(road) for road in entries]
        assert axes.count("NS") == 4 and axes.count("EW") == 4

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            roadnet.build_grid(0, 1, 300.0, 300.0)


class TestRoadnetFiles:
    def test_save_and_load(self, tmp_path):
        grid = roadnet.build_grid(1, 2, 300.0, 250.0)
        path = str(tmp_path / "roadnet.json")
        roadnet.save_roadnet(grid, path)
        loaded = roadnet.load_roadnet(path)
        assert loaded.to_dict() == grid.to_dict()

    def test_missing_sections(self, tmp_path):
        path = tmp_path / "roadnet.json"
        path.write_text(json.dumps({"nodes": []}))
        with pytest.raises(RuntimeError):
            roadnet.load_roadnet(str(path))

    def test_malformed_road(self, tmp_path):
        path = tmp_path / "roadnet.json"
        path.write_text(json.dumps({
            "nodes": [{"id": "a", "x": 0, "y": 0, "signalized": False},
                      {"id": "b", "x": 0, "y": 10, "signalized": False}],
            "roads": [{"id": "r", "from": "a", "to": "b"}]}))
        with pytest.raises(RuntimeError):
            roadnet.load_roadnet(str(path))

    def test_incomplete_intersection(self, tmp_path):
        path = tmp_path / "roadnet.json"
        path.write_text(json.dumps({
            "nodes": [{"id": "a", "x": 0, "y": 0, "signalized": True},
                      {"id": "b", "x": 0, "y": 10, "signalized": False}],
            "roads": [{"id": "r", "from": "b", "to": "a", "length_m": 10}]}))
        with pytest.raises(ValueError, match="a"):
            roadnet.load_roadnet(str(path))

    def test_five_way_junction_rejected(self, tmp_path):
        data = roadnet.build_grid(1, 1, 300.0, 300.0).to_dict()
        data["nodes"].append({"id": "extra", "x": 10.0, "y": 500.0,
                              "signalized": False})
        data["roads"].append({"id": "road_extra", "from": "extra",
                              "to": "intersection_0_0", "length_m": 500.0})
        path = tmp_path / "roadnet.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ValueError,
                           match="intersection_0_0.*road_extra"):
            roadnet.load_roadnet(str(path))

    def test_duplicate_side_rejected(self):
        grid = roadnet.build_grid(1, 1, 300.0, 300.0)
        grid.add_node(base.Boundary("extra", -5.0, 400.0))
        with pytest.raises(ValueError, match="intersection_0_0"):
            grid.add_road(base.Road("road_out", 400.0), "intersection_0_0",
                          "extra")
        assert "road_out" not in grid.roads
        grid.validate()

    def test_duplicate_road_id_replaced(self):
        grid = roadnet.build_grid(1, 1, 300.0, 300.0)
        road_id = "road_boundary_N_0_to_intersection_0_0"
        with pytest.warns(UserWarning):
            grid.add_road(base.Road(road_id, 300.0), "boundary_N_0",
                          "intersection_0_0")
        node = grid.nodes["intersection_0_0"]
        assert node.inlets[Approach.N] is grid.roads[road_id]
        assert len(grid.roads) == 8
