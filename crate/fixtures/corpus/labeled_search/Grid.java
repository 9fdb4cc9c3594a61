package demo;

public class Grid {
    public int showBug(int[][] cells, int target) {
        int found = -1;
        search:
        for (int r = 0; r < cells.length; r++) {
            for (int c = 0; c < cells[r].length; c++) {
                if (cells[r][c] == target) {
                    found = r * 10 + c;
                    break search;
                }
            }
        }
        return found;
    }
}
