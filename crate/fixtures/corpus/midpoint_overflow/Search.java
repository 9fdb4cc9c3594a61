package demo;

public class Search {
    public int showBug(int low, int high) {
        int mid = (low + high) / 2;
        return mid;
    }

    public int find(int[] sorted, int key) {
        int lo = 0;
        int hi = sorted.length - 1;
        while (lo <= hi) {
            int mid = showBug(lo, hi);
            if (sorted[mid] < key) {
                lo = mid + 1;
            } else if (sorted[mid] > key) {
                hi = mid - 1;
            } else {
                return mid;
            }
        }
        return -1;
    }
}
